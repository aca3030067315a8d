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

#ifndef BSADD_IO_HPP
#define BSADD_IO_HPP

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bsadd/continuous.hpp"
#include "bsadd/dynamics.hpp"
#include "bsadd/errors.hpp"
#include "bsadd/pmf.hpp"

namespace bsadd {

using Json = nlohmann::ordered_json;

/// Pmf JSON schema:
///   {"pmf": [p0, p1, ...], "tail_tolerance": 1e-12}
/// or the analytic geometric form
///   {"family": "geometric", "mean": 1.0, "truncation_epsilon": 1e-12}.
inline Pmf pmf_from_json(const Json &j) {
  if (!j.is_object()) throw DomainError("pmf JSON must be an object");
  if (j.contains("family")) {
    if (j["family"] != "geometric") {
      throw DomainError("unknown pmf family: " + j["family"].dump());
    }
    GeometricSpec spec;
    if (!j.contains("mean") || !j["mean"].is_number()) {
      throw DomainError("geometric pmf needs a numeric \"mean\"");
    }
    spec.mean = j["mean"].get<double>();
    if (j.contains("truncation_epsilon")) {
      spec.truncation_epsilon = j["truncation_epsilon"].get<double>();
    }
    return geometric_pmf(spec);
  }
  if (!j.contains("pmf") || !j["pmf"].is_array()) {
    throw DomainError("pmf JSON needs a \"pmf\" array or a \"family\"");
  }
  std::vector<double> probs;
  probs.reserve(j["pmf"].size());
  for (const auto &v : j["pmf"]) {
    if (!v.is_number()) throw DomainError("pmf entries must be numbers");
    probs.push_back(v.get<double>());
  }
  double tol = Pmf::kDefaultTailTolerance;
  if (j.contains("tail_tolerance")) tol = j["tail_tolerance"].get<double>();
  return make_pmf(std::move(probs), tol);
}

inline Pmf pmf_from_json_text(const std::string &text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw DomainError("invalid JSON");
  return pmf_from_json(j);
}

inline Pmf load_pmf(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open pmf file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return pmf_from_json_text(buffer.str());
}

inline Json pmf_to_json(const Pmf &p) {
  Json j;
  if (p.geometric_origin()) {
    j["family"] = "geometric";
    j["mean"] = p.geometric_origin()->mean;
    j["truncation_epsilon"] = p.geometric_origin()->truncation_epsilon;
    return j;
  }
  j["pmf"] = p.probs();
  j["tail_tolerance"] = p.tail_tolerance();
  return j;
}

/// Formats a double with 17 significant digits (lossless round-trip).
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_json_17(const Json &j, std::string &out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_json_17(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto &v : j) {
        if (!first) out += ',';
        first = false;
        dump_json_17(v, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        out += format_double(v);
      } else {
        // JSON has no infinities; match the report convention.
        out += v > 0 ? "\"+inf\"" : (v < 0 ? "\"-inf\"" : "\"nan\"");
      }
      break;
    }
    default:
      out += j.dump();
      break;
  }
}

}  // namespace detail

/// Deterministic serialization: fixed field order (insertion order of the
/// ordered_json), floats at 17 significant digits, non-finite values as
/// the strings "+inf" / "-inf" / "nan".
inline std::string dump_json_17(const Json &j) {
  std::string out;
  detail::dump_json_17(j, out);
  return out;
}

/// FNV-1a 64-bit digest, hex-encoded; used for input digests in reports.
inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string file_digest(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fnv1a_hex(buffer.str());
}

/// Trajectory CSV: header `eta,n,prob`, one row per (grid point, state).
inline void write_trajectory_csv(std::ostream &out,
                                 const std::vector<EvolvePoint> &trajectory) {
  out << "eta,n,prob\n";
  for (const auto &point : trajectory) {
    const auto &pv = point.pmf.probs();
    for (std::size_t n = 0; n < pv.size(); ++n) {
      out << format_double(point.eta) << ',' << n << ',' << format_double(pv[n])
          << '\n';
    }
  }
}

/// Density CSV: header `u,density`, sampled on the given grid.
inline void write_density_csv(std::ostream &out, const RadialDensity &f,
                              const std::vector<double> &u_grid) {
  out << "u,density\n";
  for (double u : u_grid) {
    out << format_double(u) << ',' << format_double(f(u)) << '\n';
  }
}

}  // namespace bsadd

#endif
