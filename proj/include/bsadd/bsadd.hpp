// Copyright 2026 The bsadd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BSADD_BSADD_HPP
#define BSADD_BSADD_HPP

#include "bsadd/beamsplitter.hpp"
#include "bsadd/continuous.hpp"
#include "bsadd/dynamics.hpp"
#include "bsadd/errors.hpp"
#include "bsadd/io.hpp"
#include "bsadd/laguerre.hpp"
#include "bsadd/pmf.hpp"
#include "bsadd/transforms.hpp"

#endif
