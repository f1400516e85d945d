#pragma once

// File formats:
//  - correspondence CSV, header "ax,ay,az,bx,by,bz" with optional ",sigma"
//    column (sigma defaults to 1.0 when absent); numbers re-render with 17
//    significant digits so save -> load -> save is byte-identical;
//  - ASCII PLY point clouds ("element vertex" with x/y/z properties; binary
//    encodings rejected with an explicit unsupported-format error);
//  - problem instances as JSON:
//      {n, cbar_sq, correspondences: [{a:[..], b:[..], sigma}], truth?}
//    where truth = {q: [4], theta: [N]} when the generator's ground truth is
//    known. Quaternions are scalar-last.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "certrot/problem.hpp"
#include "certrot/synthetic.hpp"

namespace certrot {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class UnsupportedFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double_field(const std::string& s, const std::string& path, int line) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
  double value = 0.0;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || begin == end) {
    throw ParseError(path, line, "expected a number, got '" + s + "'");
  }
  return value;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

inline std::vector<Correspondence> load_correspondences(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError(path, 0, "cannot open file");
  std::string line;
  if (!std::getline(is, line)) throw ParseError(path, 1, "empty file");
  const std::string header = detail::strip_cr(line);
  bool has_sigma = false;
  if (header == "ax,ay,az,bx,by,bz") {
    has_sigma = false;
  } else if (header == "ax,ay,az,bx,by,bz,sigma") {
    has_sigma = true;
  } else {
    throw ParseError(path, 1, "bad header; expected ax,ay,az,bx,by,bz[,sigma]");
  }
  const std::size_t want = has_sigma ? 7 : 6;
  std::vector<Correspondence> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string row = detail::strip_cr(line);
    if (row.empty()) continue;
    const auto fields = detail::split_csv_line(row);
    if (fields.size() != want) {
      throw ParseError(path, lineno,
                       "expected " + std::to_string(want) + " fields, got " +
                           std::to_string(fields.size()));
    }
    double v[7] = {0, 0, 0, 0, 0, 0, 1.0};
    for (std::size_t i = 0; i < want; ++i) {
      v[i] = detail::parse_double_field(fields[i], path, lineno);
    }
    try {
      out.emplace_back(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]), v[6]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return out;
}

inline void save_correspondences(const std::string& path,
                                 const std::vector<Correspondence>& corrs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_correspondences: cannot open " + path);
  os << "ax,ay,az,bx,by,bz,sigma\n";
  char buf[512];
  for (const Correspondence& c : corrs) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  c.a[0], c.a[1], c.a[2], c.b[0], c.b[1], c.b[2], c.sigma);
    os << buf;
  }
  if (!os) throw std::runtime_error("save_correspondences: write failed for " + path);
}

// ASCII PLY reader, vertex positions only. Extra vertex properties are
// skipped by column position; elements after "vertex" are ignored.
inline std::vector<Vec3> parse_ply(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError(path, 0, "cannot open file");
  std::string line;
  int lineno = 0;

  auto next_line = [&]() -> std::string {
    if (!std::getline(is, line)) throw ParseError(path, lineno, "unexpected end of file");
    ++lineno;
    return detail::strip_cr(line);
  };

  if (next_line() != "ply") throw ParseError(path, lineno, "missing 'ply' magic");

  long vertex_count = -1;
  int xi = -1, yi = -1, zi = -1;
  int prop_count = 0;
  bool fmt_seen = false;
  bool in_vertex_element = false;
  for (;;) {
    const std::string row = next_line();
    std::istringstream ss(row);
    std::string tok;
    ss >> tok;
    if (tok == "comment" || tok.empty()) continue;
    if (tok == "format") {
      std::string kind;
      ss >> kind;
      if (kind != "ascii") {
        throw UnsupportedFormatError(path + ": unsupported PLY encoding '" + kind +
                                     "' (only 'format ascii 1.0' is supported)");
      }
      fmt_seen = true;
    } else if (tok == "element") {
      std::string name;
      long count = 0;
      ss >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
    } else if (tok == "property") {
      if (!in_vertex_element) continue;
      std::string type, name;
      ss >> type >> name;
      if (type == "list") continue;  // list property cannot be a coordinate
      if (name == "x") xi = prop_count;
      if (name == "y") yi = prop_count;
      if (name == "z") zi = prop_count;
      ++prop_count;
    } else if (tok == "end_header") {
      break;
    } else {
      throw ParseError(path, lineno, "unknown header token '" + tok + "'");
    }
  }
  if (!fmt_seen) throw ParseError(path, lineno, "missing 'format' line");
  if (vertex_count < 0) throw ParseError(path, lineno, "missing 'element vertex'");
  if (xi < 0 || yi < 0 || zi < 0) {
    throw ParseError(path, lineno, "vertex element lacks x/y/z properties");
  }

  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(vertex_count));
  for (long v = 0; v < vertex_count; ++v) {
    const std::string row = next_line();
    std::vector<std::string> toks;
    {
      std::istringstream tss(row);
      std::string t;
      while (tss >> t) toks.push_back(t);
    }
    if (static_cast<int>(toks.size()) < prop_count) {
      throw ParseError(path, lineno, "vertex row has too few values");
    }
    const double x = detail::parse_double_field(toks[static_cast<std::size_t>(xi)], path, lineno);
    const double y = detail::parse_double_field(toks[static_cast<std::size_t>(yi)], path, lineno);
    const double z = detail::parse_double_field(toks[static_cast<std::size_t>(zi)], path, lineno);
    pts.emplace_back(x, y, z);
  }
  return pts;
}

struct LoadedInstance {
  RobustWahbaProblem problem;
  std::optional<UnitQuaternion> q_true;
  std::optional<std::vector<int>> theta_true;
};

inline nlohmann::json problem_to_json(const RobustWahbaProblem& p,
                                      const UnitQuaternion* q_true = nullptr,
                                      const std::vector<int>* theta_true = nullptr) {
  nlohmann::json j;
  j["n"] = p.size();
  j["cbar_sq"] = p.cbar_sq();
  nlohmann::json corrs = nlohmann::json::array();
  for (const Correspondence& c : p.correspondences()) {
    corrs.push_back({{"a", {c.a[0], c.a[1], c.a[2]}},
                     {"b", {c.b[0], c.b[1], c.b[2]}},
                     {"sigma", c.sigma}});
  }
  j["correspondences"] = std::move(corrs);
  if (q_true != nullptr) {
    nlohmann::json truth;
    truth["q"] = {q_true->coeffs()[0], q_true->coeffs()[1], q_true->coeffs()[2],
                  q_true->coeffs()[3]};
    if (theta_true != nullptr) truth["theta"] = *theta_true;
    j["truth"] = std::move(truth);
  }
  return j;
}

inline nlohmann::json instance_to_json(const SyntheticInstance& inst) {
  return problem_to_json(inst.problem, &inst.q_true, &inst.theta_true);
}

inline LoadedInstance instance_from_json(const nlohmann::json& j, const std::string& path = "<json>") {
  try {
    const int n = j.at("n").get<int>();
    const double cbar_sq = j.at("cbar_sq").get<double>();
    const auto& arr = j.at("correspondences");
    if (static_cast<int>(arr.size()) != n) {
      throw ParseError(path, 0, "correspondence count does not match n");
    }
    std::vector<Correspondence> corrs;
    corrs.reserve(arr.size());
    for (const auto& e : arr) {
      const auto& a = e.at("a");
      const auto& b = e.at("b");
      if (a.size() != 3 || b.size() != 3) throw ParseError(path, 0, "a/b must have 3 entries");
      corrs.emplace_back(Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>()),
                         Vec3(b[0].get<double>(), b[1].get<double>(), b[2].get<double>()),
                         e.at("sigma").get<double>());
    }
    LoadedInstance out{RobustWahbaProblem(std::move(corrs), cbar_sq), std::nullopt, std::nullopt};
    if (j.contains("truth")) {
      const auto& t = j.at("truth");
      const auto& q = t.at("q");
      if (q.size() != 4) throw ParseError(path, 0, "truth.q must have 4 entries");
      out.q_true = UnitQuaternion(Vec4(q[0].get<double>(), q[1].get<double>(),
                                       q[2].get<double>(), q[3].get<double>()));
      if (t.contains("theta")) {
        std::vector<int> theta = t.at("theta").get<std::vector<int>>();
        if (static_cast<int>(theta.size()) != n) {
          throw ParseError(path, 0, "truth.theta length does not match n");
        }
        out.theta_true = std::move(theta);
      }
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, std::string("bad instance JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 0, std::string("bad instance data: ") + e.what());
  }
}

inline LoadedInstance load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError(path, 0, "cannot open file");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
  }
  return instance_from_json(j, path);
}

inline void save_instance(const std::string& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_instance: cannot open " + path);
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("save_instance: write failed for " + path);
}

}  // namespace certrot
