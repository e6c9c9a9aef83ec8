#pragma once

// CPLEX LP text export/import for linear models (debugging with external solvers).
// Variables are written as x<index>, rows as r<index>, numbers with 17 significant digits.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <unordered_map>

#include "helios/model/model_instance.hpp"

namespace helios {

namespace lp_detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_terms(std::ostringstream& os, const int* idx, const double* val, size_t n) {
  size_t col = 0;
  for (size_t k = 0; k < n; ++k) {
    double v = val[k];
    std::string t = (v < 0 ? " - " : " + ") + num(std::abs(v)) + " x" + std::to_string(idx[k]);
    col += t.size();
    os << t;
    if (col > 200) {
      os << "\n ";
      col = 0;
    }
  }
}

}  // namespace lp_detail

inline std::string to_lp(const ModelInstance& m) {
  if (!m.cones.empty()) fail(ErrorCode::validation, "LP text format cannot express cone constraints");
  std::ostringstream os;
  os << "\\ " << m.name << "\nMinimize\n obj:";
  std::vector<int> idx;
  std::vector<double> val;
  for (int j = 0; j < m.num_vars(); ++j)
    if (m.obj[j] != 0.0) {
      idx.push_back(j);
      val.push_back(m.obj[j]);
    }
  lp_detail::write_terms(os, idx.data(), val.data(), idx.size());
  if (m.obj_offset != 0.0) os << (m.obj_offset < 0 ? " - " : " + ") << lp_detail::num(std::abs(m.obj_offset));
  if (idx.empty() && m.obj_offset == 0.0) os << " 0 x0";
  os << "\nSubject To\n";
  for (int i = 0; i < m.num_rows(); ++i) {
    os << " r" << i << ":";
    int b = m.row_ptr[i], e = m.row_ptr[i + 1];
    if (b == e) os << " 0 x0";
    lp_detail::write_terms(os, m.cols.data() + b, m.vals.data() + b, e - b);
    os << (m.sense[i] == Sense::le ? " <= " : m.sense[i] == Sense::ge ? " >= " : " = ") << lp_detail::num(m.rhs[i])
       << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < m.num_vars(); ++j) {
    double l = m.lb[j], u = m.ub[j];
    std::string x = "x" + std::to_string(j);
    if (l == 0.0 && u == kInf) continue;
    if (l == -kInf && u == kInf) {
      os << " " << x << " free\n";
    } else if (l == u) {
      os << " " << x << " = " << lp_detail::num(l) << "\n";
    } else {
      os << " " << (l == -kInf ? "-inf" : lp_detail::num(l)) << " <= " << x << " <= "
         << (u == kInf ? "+inf" : lp_detail::num(u)) << "\n";
    }
  }
  os << "End\n";
  return os.str();
}

// Reads the subset of CPLEX LP written by to_lp (plus Maximize and one-sided bounds).
inline ModelInstance from_lp(const std::string& text) {
  std::vector<std::string> tok;
  {
    size_t i = 0;
    auto push = [&](std::string t) { tok.push_back(std::move(t)); };
    while (i < text.size()) {
      char c = text[i];
      if (c == '\\') {
        while (i < text.size() && text[i] != '\n') ++i;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '<' || c == '>' || c == '=') {
        std::string t(1, c);
        ++i;
        if (i < text.size() && (text[i] == '=' || text[i] == '<' || text[i] == '>')) t += text[i++];
        push(t);
      } else if (c == '+' || c == '-' || c == ':') {
        push(std::string(1, c));
        ++i;
      } else {
        size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
               std::string("<>=:+-").find(text[j]) == std::string::npos) {
          // keep exponents such as 1e-05 together
          ++j;
          if (j < text.size() && (text[j] == '-' || text[j] == '+') && (text[j - 1] == 'e' || text[j - 1] == 'E') &&
              std::isdigit(static_cast<unsigned char>(text[i])))
            ++j;
        }
        push(text.substr(i, j - i));
        i = j;
      }
    }
  }
  auto lower = [](std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  auto is_number = [](const std::string& s) {
    if (s.empty()) return false;
    char* end = nullptr;
    std::strtod(s.c_str(), &end);
    return end && *end == '\0';
  };
  auto parse_num = [&](const std::string& s) -> double {
    std::string l = lower(s);
    if (l == "inf" || l == "infinity") return kInf;
    if (!is_number(s)) fail(ErrorCode::parse, "LP: expected number, got '" + s + "'");
    return std::strtod(s.c_str(), nullptr);
  };

  ModelInstance m;
  m.name = "lp";
  std::unordered_map<std::string, int> vars;
  auto var = [&](const std::string& name) {
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    int j = m.add_variable(name, 0.0, kInf);
    vars.emplace(name, j);
    return j;
  };
  // Pre-register x<k> names in numeric order so indices survive a round trip.
  {
    int maxk = -1;
    for (const auto& t : tok)
      if (t.size() > 1 && t[0] == 'x' && std::all_of(t.begin() + 1, t.end(), ::isdigit))
        maxk = std::max(maxk, std::stoi(t.substr(1)));
    for (int k = 0; k <= maxk; ++k) var("x" + std::to_string(k));
  }

  size_t p = 0;
  auto at_end = [&] { return p >= tok.size(); };
  auto is_section = [&](const std::string& t) {
    std::string l = lower(t);
    return l == "subject" || l == "st" || l == "s.t." || l == "bounds" || l == "end" || l == "such" ||
           l == "minimize" || l == "maximize" || l == "minimise" || l == "maximise" || l == "min" || l == "max" ||
           l == "free" || l == "general" || l == "generals" || l == "binary" || l == "binaries";
  };
  // Linear expression until a relational operator or section keyword; returns constant part.
  auto read_expr = [&](LinExpr& e) -> double {
    double constant = 0.0;
    double sign = 1.0;
    while (!at_end()) {
      const std::string& t = tok[p];
      if (t == "<" || t == "<=" || t == "=<" || t == ">" || t == ">=" || t == "=>" || t == "=") break;
      if (is_section(t)) break;
      if (p + 1 < tok.size() && tok[p + 1] == ":") break;  // next row name
      if (t == "+") {
        ++p;
        continue;
      }
      if (t == "-") {
        sign = -sign;
        ++p;
        continue;
      }
      double coef = 1.0;
      if (is_number(t)) {
        coef = std::strtod(t.c_str(), nullptr);
        ++p;
        if (at_end() || tok[p] == "+" || tok[p] == "-" || is_section(tok[p]) || tok[p][0] == '<' ||
            tok[p][0] == '>' || tok[p][0] == '=' || (p + 1 < tok.size() && tok[p + 1] == ":")) {
          constant += sign * coef;
          sign = 1.0;
          continue;
        }
      }
      e.add(var(tok[p]), sign * coef);
      ++p;
      sign = 1.0;
    }
    return constant;
  };
  auto read_sense = [&]() -> Sense {
    std::string t = tok[p++];
    if (t == "<" || t == "<=" || t == "=<") return Sense::le;
    if (t == ">" || t == ">=" || t == "=>") return Sense::ge;
    if (t == "=") return Sense::eq;
    fail(ErrorCode::parse, "LP: expected relational operator, got '" + t + "'");
  };

  bool maximize = false;
  std::string section;
  std::vector<std::tuple<LinExpr, Sense, double>> rows;
  while (!at_end()) {
    std::string l = lower(tok[p]);
    if (l == "minimize" || l == "minimise" || l == "min" || l == "maximize" || l == "maximise" || l == "max") {
      maximize = l[1] == 'a';
      ++p;
      if (p + 1 < tok.size() && tok[p + 1] == ":") p += 2;
      LinExpr e;
      m.obj_offset = read_expr(e);
      for (size_t k = 0; k < e.idx.size(); ++k) m.obj[e.idx[k]] += e.val[k];
      continue;
    }
    if (l == "subject" || l == "such") {
      p += 2;
      section = "rows";
      continue;
    }
    if (l == "st" || l == "s.t.") {
      ++p;
      section = "rows";
      continue;
    }
    if (l == "bounds") {
      ++p;
      section = "bounds";
      continue;
    }
    if (l == "end") break;
    if (section == "rows") {
      if (p + 1 < tok.size() && tok[p + 1] == ":") p += 2;
      LinExpr e;
      double c = read_expr(e);
      Sense s = read_sense();
      double sign = 1.0;
      if (tok[p] == "-") {
        sign = -1.0;
        ++p;
      } else if (tok[p] == "+") {
        ++p;
      }
      double r = sign * parse_num(tok[p++]) - c;
      rows.emplace_back(std::move(e), s, r);
    } else if (section == "bounds") {
      // forms: x free | l <= x <= u | x >= l | x <= u | x = v
      auto read_value = [&]() {
        double sign = 1.0;
        if (tok[p] == "-") {
          sign = -1.0;
          ++p;
        } else if (tok[p] == "+") {
          ++p;
        }
        return sign * parse_num(tok[p++]);
      };
      bool leading = tok[p] == "-" || tok[p] == "+" || is_number(tok[p]) || lower(tok[p]) == "inf" ||
                     lower(tok[p]) == "infinity";
      if (leading) {
        double lo = read_value();
        Sense s1 = read_sense();
        int j = var(tok[p++]);
        if (s1 == Sense::le) m.lb[j] = lo;
        else if (s1 == Sense::ge) m.ub[j] = lo;
        else m.lb[j] = m.ub[j] = lo;
        if (!at_end() && (tok[p] == "<=" || tok[p] == "<" || tok[p] == "=<")) {
          ++p;
          m.ub[j] = read_value();
        }
      } else {
        int j = var(tok[p++]);
        if (lower(tok[p]) == "free") {
          ++p;
          m.lb[j] = -kInf;
          m.ub[j] = kInf;
        } else {
          Sense s = read_sense();
          double v = read_value();
          if (s == Sense::le) m.ub[j] = v;
          else if (s == Sense::ge) m.lb[j] = v;
          else m.lb[j] = m.ub[j] = v;
        }
      }
    } else {
      fail(ErrorCode::parse, "LP: unexpected token '" + tok[p] + "'");
    }
  }
  if (maximize) {
    for (double& c : m.obj) c = -c;
    m.obj_offset = -m.obj_offset;
  }
  m.begin_rows("rows", "");
  for (auto& [e, s, r] : rows) m.add_row(e, s, r);
  return m;
}

}  // namespace helios
