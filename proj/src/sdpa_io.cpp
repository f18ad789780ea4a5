#include "roundoff/errors.hpp"
#include "roundoff/sdp.hpp"

#include <charconv>
#include <cstdio>
#include <memory>
#include <sstream>

namespace roundoff {

namespace {

// Shortest round-trip decimal, always with a decimal point or exponent.
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.17e", v);
  return buf;
}

// Numbers from a line, treating braces, parentheses and commas as blanks.
std::vector<double> numbers(std::string line) {
  for (char& c : line)
    if (c == '{' || c == '}' || c == '(' || c == ')' || c == ',') c = ' ';
  std::istringstream is(line);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw ParseError("bad number '" + tok + "'");
      out.push_back(v);
    } catch (const std::invalid_argument&) {
      throw ParseError("bad number '" + tok + "'");
    } catch (const std::out_of_range&) {
      throw ParseError("number out of range '" + tok + "'");
    }
  }
  return out;
}

struct Brace {
  bool leaf = false;
  double value = 0;
  std::vector<Brace> kids;
};

class BraceParser {
 public:
  explicit BraceParser(const std::string& s, std::size_t pos) : s_(s), pos_(pos) {}

  Brace group() {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != '{') throw MalformedSolutionFile("expected '{'");
    ++pos_;
    Brace b;
    for (;;) {
      skip();
      if (pos_ >= s_.size()) throw MalformedSolutionFile("unterminated brace group");
      char c = s_[pos_];
      if (c == '}') {
        ++pos_;
        return b;
      }
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == '{') {
        b.kids.push_back(group());
        continue;
      }
      std::size_t end = pos_;
      while (end < s_.size() && s_[end] != ',' && s_[end] != '}' && s_[end] != '{' &&
             !std::isspace(static_cast<unsigned char>(s_[end])))
        ++end;
      Brace leaf;
      leaf.leaf = true;
      try {
        leaf.value = std::stod(s_.substr(pos_, end - pos_));
      } catch (const std::exception&) {
        throw MalformedSolutionFile("bad number in solution file");
      }
      b.kids.push_back(leaf);
      pos_ = end;
    }
  }

 private:
  const std::string& s_;
  std::size_t pos_;
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
};

std::vector<double> leaves(const Brace& b) {
  std::vector<double> out;
  for (const auto& k : b.kids) {
    if (!k.leaf) throw MalformedSolutionFile("expected a flat vector");
    out.push_back(k.value);
  }
  return out;
}

std::vector<Eigen::MatrixXd> matrices(const Brace& top) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& blk : top.kids) {
    if (blk.leaf) throw MalformedSolutionFile("expected a block");
    bool diag = !blk.kids.empty() && blk.kids[0].leaf;
    if (diag) {
      auto v = leaves(blk);
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(v.size(), v.size());
      for (std::size_t i = 0; i < v.size(); ++i) M(i, i) = v[i];
      out.push_back(M);
    } else {
      std::size_t n = blk.kids.size();
      Eigen::MatrixXd M(n, n);
      for (std::size_t i = 0; i < n; ++i) {
        auto row = leaves(blk.kids[i]);
        if (row.size() != n) throw MalformedSolutionFile("non-square block");
        for (std::size_t j = 0; j < n; ++j) M(i, j) = row[j];
      }
      out.push_back(M);
    }
  }
  return out;
}

std::string write_blocks(const std::vector<Eigen::MatrixXd>& mats, const SdpProblem& P) {
  std::ostringstream os;
  os << "{\n";
  for (std::size_t k = 0; k < mats.size(); ++k) {
    const auto& M = mats[k];
    bool diag = k < P.block_sizes.size() && P.block_sizes[k] < 0;
    if (diag) {
      os << "{";
      for (int i = 0; i < M.rows(); ++i) os << (i ? "," : "") << fmt_sci(M(i, i));
      os << "}\n";
    } else {
      os << "{ ";
      for (int i = 0; i < M.rows(); ++i) {
        os << (i ? ", " : "") << "{";
        for (int j = 0; j < M.cols(); ++j) os << (j ? "," : "") << fmt_sci(M(i, j));
        os << "}";
      }
      os << " }\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace

std::string export_sdpa_sparse(const SdpProblem& P) {
  std::ostringstream os;
  os << P.m() << "\n" << P.block_sizes.size() << "\n";
  for (std::size_t k = 0; k < P.block_sizes.size(); ++k) os << (k ? " " : "") << P.block_sizes[k];
  os << "\n";
  for (int i = 0; i < P.m(); ++i) os << (i ? " " : "") << fmt(P.c[i]);
  os << "\n";
  for (int k = 0; k <= P.m(); ++k)
    for (const auto& e : P.F[k]) {
      int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
      os << k << " " << e.block + 1 << " " << i + 1 << " " << j + 1 << " " << fmt(e.value) << "\n";
    }
  return os.str();
}

SdpProblem import_sdpa_sparse(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '"' || line[first] == '*') continue;
    lines.push_back(line);
  }
  std::size_t li = 0;
  auto need = [&](const char* what) -> std::vector<double> {
    if (li >= lines.size()) throw ParseError(std::string("missing ") + what);
    return numbers(lines[li++]);
  };
  SdpProblem P;
  auto mv = need("constraint count");
  if (mv.empty()) throw ParseError("missing constraint count");
  int m = static_cast<int>(mv[0]);
  auto nv = need("block count");
  if (nv.empty()) throw ParseError("missing block count");
  int nb = static_cast<int>(nv[0]);
  std::vector<double> sizes;
  while (static_cast<int>(sizes.size()) < nb) {
    auto v = need("block sizes");
    sizes.insert(sizes.end(), v.begin(), v.end());
  }
  for (int k = 0; k < nb; ++k) P.block_sizes.push_back(static_cast<int>(sizes[k]));
  std::vector<double> c;
  while (static_cast<int>(c.size()) < m) {
    auto v = need("objective vector");
    c.insert(c.end(), v.begin(), v.end());
  }
  c.resize(m);
  P.c = c;
  P.F.assign(m + 1, {});
  for (; li < lines.size(); ++li) {
    auto v = numbers(lines[li]);
    if (v.size() != 5) throw ParseError("expected 5 numbers per entry line");
    int k = static_cast<int>(v[0]), b = static_cast<int>(v[1]) - 1;
    int i = static_cast<int>(v[2]) - 1, j = static_cast<int>(v[3]) - 1;
    if (k < 0 || k > m || b < 0 || b >= nb || i < 0 || j < 0 || i >= std::abs(P.block_sizes[b]) ||
        j >= std::abs(P.block_sizes[b]))
      throw ParseError("entry index out of range");
    P.F[k].push_back({b, std::min(i, j), std::max(i, j), v[4]});
  }
  return P;
}

std::string write_sdpa_result(const SdpSolution& sol, const SdpProblem& P) {
  std::ostringstream os;
  const char* phase = sol.status == SdpStatus::Optimal      ? "pdOPT"
                      : sol.status == SdpStatus::Infeasible ? "pdINF"
                                                            : "noINFO";
  os << "phase.value  = " << phase << "\n";
  os << "   Iteration = " << sol.iterations << "\n";
  os << "relative gap = " << fmt_sci(sol.relative_gap) << "\n";
  os << "objValPrimal = " << fmt_sci(sol.primal_objective) << "\n";
  os << "objValDual   = " << fmt_sci(sol.dual_objective) << "\n";
  os << "p.feas.error = " << fmt_sci(sol.primal_infeasibility) << "\n";
  os << "d.feas.error = " << fmt_sci(sol.dual_infeasibility) << "\n";
  os << "xVec = \n{";
  for (int i = 0; i < sol.x.size(); ++i) os << (i ? "," : "") << fmt_sci(sol.x(i));
  os << "}\n";
  os << "xMat = \n" << write_blocks(sol.X, P);
  os << "yMat = \n" << write_blocks(sol.Y, P);
  return os.str();
}

SdpSolution parse_sdpa_solution(const std::string& text, const SdpProblem* problem) {
  SdpSolution sol;
  auto value_after = [&](const std::string& key, bool required) -> std::string {
    auto p = text.find(key);
    if (p == std::string::npos) {
      if (required) throw MalformedSolutionFile("missing '" + key + "'");
      return "";
    }
    p = text.find('=', p);
    if (p == std::string::npos) throw MalformedSolutionFile("missing '=' after " + key);
    std::istringstream is(text.substr(p + 1, 200));
    std::string tok;
    is >> tok;
    return tok;
  };
  std::string phase = value_after("phase.value", true);
  if (phase.find("OPT") != std::string::npos)
    sol.status = SdpStatus::Optimal;
  else if (phase.find("INF") != std::string::npos || phase.find("UNBD") != std::string::npos)
    sol.status = SdpStatus::Infeasible;
  else
    sol.status = SdpStatus::NumericalTrouble;
  auto num = [&](const std::string& key, bool required) {
    std::string t = value_after(key, required);
    if (t.empty()) return 0.0;
    try {
      return std::stod(t);
    } catch (const std::exception&) {
      throw MalformedSolutionFile("bad value for " + key);
    }
  };
  sol.primal_objective = num("objValPrimal", true);
  sol.dual_objective = num("objValDual", true);
  sol.relative_gap = num("relative gap", false);
  sol.primal_infeasibility = num("p.feas.error", false);
  sol.dual_infeasibility = num("d.feas.error", false);
  std::string it = value_after("Iteration", false);
  if (!it.empty()) sol.iterations = std::atoi(it.c_str());
  auto group_after = [&](const std::string& key) {
    auto p = text.find(key);
    if (p == std::string::npos) throw MalformedSolutionFile("missing '" + key + "'");
    p = text.find('=', p);
    if (p == std::string::npos) throw MalformedSolutionFile("missing '=' after " + key);
    return BraceParser(text, p + 1).group();
  };
  auto xv = leaves(group_after("xVec"));
  sol.x = Eigen::VectorXd::Map(xv.data(), xv.size());
  sol.X = matrices(group_after("xMat"));
  sol.Y = matrices(group_after("yMat"));
  if (problem) {
    if (sol.x.size() != problem->m()) throw MalformedSolutionFile("xVec length does not match the problem");
    if (sol.X.size() != problem->block_sizes.size() || sol.Y.size() != problem->block_sizes.size())
      throw MalformedSolutionFile("block count does not match the problem");
    for (std::size_t k = 0; k < sol.X.size(); ++k)
      if (sol.X[k].rows() != std::abs(problem->block_sizes[k]) || sol.Y[k].rows() != std::abs(problem->block_sizes[k]))
        throw MalformedSolutionFile("block size does not match the problem");
  }
  return sol;
}

}  // namespace roundoff
