#include "roundoff/sdp.hpp"

#include "roundoff/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

namespace roundoff {

const char* status_name(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
    case SdpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

std::vector<Eigen::MatrixXd> dense_matrix(const SdpProblem& problem, int k) {
  std::vector<Eigen::MatrixXd> out;
  for (int s : problem.block_sizes) out.push_back(Eigen::MatrixXd::Zero(std::abs(s), std::abs(s)));
  for (const auto& e : problem.F.at(k)) {
    out[e.block](e.i, e.j) += e.value;
    if (e.i != e.j) out[e.block](e.j, e.i) += e.value;
  }
  return out;
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Entry {
  int row;
  int p, q;  // p <= q
  double v;
};

struct Block {
  int size = 0;
  std::vector<Entry> entries;  // constraint entries sorted by row
  std::vector<int> rows;       // distinct rows
  std::vector<int> row_begin;  // entries range per distinct row (size rows+1)
  std::vector<Entry> cost;     // entries of C
};

// Internal standard form: min <C, X> s.t. <A_i, X> = b_i, X >= 0 with C = -F_0, A_i = F_i.
struct Internal {
  int m = 0;
  std::vector<Block> blocks;
  Vec b;
  // mapping of each internal block back to (original block, offset, diagonal)
  std::vector<std::pair<int, int>> origin;
  std::vector<bool> diagonal_origin;
  // Schur structure
  int ngroups = 0;
  std::vector<int> group, local;  // per row
  std::vector<int> group_size;
  int nborder = 0;
};

Internal build_internal(const SdpProblem& P) {
  Internal I;
  I.m = P.m();
  I.b = Vec::Map(P.c.data(), P.m());
  std::vector<std::vector<int>> map(P.block_sizes.size());  // original block -> internal index base
  for (std::size_t k = 0; k < P.block_sizes.size(); ++k) {
    int s = P.block_sizes[k];
    if (s > 0) {
      map[k] = {static_cast<int>(I.blocks.size())};
      I.blocks.push_back(Block{s, {}, {}, {}, {}});
      I.origin.push_back({static_cast<int>(k), 0});
      I.diagonal_origin.push_back(false);
    } else {
      for (int i = 0; i < -s; ++i) {
        map[k].push_back(static_cast<int>(I.blocks.size()));
        I.blocks.push_back(Block{1, {}, {}, {}, {}});
        I.origin.push_back({static_cast<int>(k), i});
        I.diagonal_origin.push_back(true);
      }
    }
  }
  auto place = [&](const SdpEntry& e, int& blk, int& p, int& q) {
    int s = P.block_sizes.at(e.block);
    int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
    if (s > 0) {
      blk = map[e.block][0];
      p = i;
      q = j;
    } else {
      if (i != j) throw Error("off-diagonal entry in a diagonal block");
      blk = map[e.block][i];
      p = q = 0;
    }
  };
  for (int k = 0; k <= P.m(); ++k) {
    for (const auto& e : P.F.at(k)) {
      if (e.value == 0) continue;
      int blk, p, q;
      place(e, blk, p, q);
      if (k == 0)
        I.blocks[blk].cost.push_back({-1, p, q, -e.value});
      else
        I.blocks[blk].entries.push_back({k - 1, p, q, e.value});
    }
  }
  for (auto& B : I.blocks) {
    std::stable_sort(B.entries.begin(), B.entries.end(), [](const Entry& a, const Entry& b) { return a.row < b.row; });
    // merge duplicates
    std::vector<Entry> merged;
    for (const auto& e : B.entries) {
      if (!merged.empty() && merged.back().row == e.row && merged.back().p == e.p && merged.back().q == e.q)
        merged.back().v += e.v;
      else
        merged.push_back(e);
    }
    B.entries = merged;
    for (std::size_t t = 0; t < B.entries.size(); ++t) {
      if (B.rows.empty() || B.rows.back() != B.entries[t].row) {
        B.rows.push_back(B.entries[t].row);
        B.row_begin.push_back(static_cast<int>(t));
      }
    }
    B.row_begin.push_back(static_cast<int>(B.entries.size()));
  }
  // Schur partition
  std::vector<int> hint(I.m, -1);
  if (static_cast<int>(P.group_hint.size()) == I.m) hint = P.group_hint;
  bool valid = true;
  for (const auto& B : I.blocks) {
    int g = -2;
    for (int r : B.rows) {
      if (hint[r] < 0) continue;
      if (g == -2) g = hint[r];
      if (g != hint[r]) valid = false;
    }
  }
  if (!valid) std::fill(hint.begin(), hint.end(), -1);
  std::vector<int> remap;
  int maxg = -1;
  for (int h : hint) maxg = std::max(maxg, h);
  remap.assign(maxg + 1, -1);
  I.group.assign(I.m, -1);
  I.local.assign(I.m, 0);
  for (int r = 0; r < I.m; ++r) {
    if (hint[r] < 0) {
      I.local[r] = I.nborder++;
    } else {
      if (remap[hint[r]] < 0) {
        remap[hint[r]] = I.ngroups++;
        I.group_size.push_back(0);
      }
      int g = remap[hint[r]];
      I.group[r] = g;
      I.local[r] = I.group_size[g]++;
    }
  }
  return I;
}

int hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(n, 1u, 16u));
}

template <class F>
void parallel_for(int n, F f) {
  int nt = std::min(hardware_threads(), n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) f(i, 0);
    return;
  }
  std::vector<std::thread> th;
  std::atomic<int> next{0};
  for (int t = 0; t < nt; ++t)
    th.emplace_back([&, t] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        f(i, t);
      }
    });
  for (auto& t : th) t.join();
}

// Schur complement matrix with block-arrow structure (groups plus a dense border).
class Schur {
 public:
  explicit Schur(const Internal& I) : I_(I) {
    for (int g = 0; g < I.ngroups; ++g) {
      D_.push_back(Mat::Zero(I.group_size[g], I.group_size[g]));
      B_.push_back(Mat::Zero(I.group_size[g], I.nborder));
    }
    E_ = Mat::Zero(I.nborder, I.nborder);
  }

  void zero() {
    for (auto& d : D_) d.setZero();
    for (auto& b : B_) b.setZero();
    E_.setZero();
  }

  // Adds v to M(i,j) and M(j,i).
  void add(int i, int j, double v) {
    int gi = I_.group[i], gj = I_.group[j];
    int li = I_.local[i], lj = I_.local[j];
    if (gi < 0 && gj < 0) {
      E_(li, lj) += v;
      if (i != j) E_(lj, li) += v;
    } else if (gi >= 0 && gj >= 0) {
      D_[gi](li, lj) += v;
      if (i != j) D_[gi](lj, li) += v;
    } else if (gi >= 0) {
      B_[gi](li, lj) += v;
    } else {
      B_[gj](lj, li) += v;
    }
  }

  double max_diag() const {
    double m = 0;
    for (const auto& d : D_)
      if (d.size()) m = std::max(m, d.diagonal().cwiseAbs().maxCoeff());
    if (E_.size()) m = std::max(m, E_.diagonal().cwiseAbs().maxCoeff());
    return m;
  }

  bool factor(double reg) {
    int G = static_cast<int>(D_.size());
    Dl_.assign(G, Eigen::LLT<Mat>());
    U_.assign(G, Mat());
    std::vector<char> ok(G, 1);
    int nt = std::min(hardware_threads(), std::max(G, 1));
    std::vector<Mat> partial(nt, Mat::Zero(I_.nborder, I_.nborder));
    parallel_for(G, [&](int g, int t) {
      Mat d = D_[g];
      if (reg > 0) d.diagonal().array() += reg * std::max(1.0, d.diagonal().cwiseAbs().maxCoeff());
      Dl_[g].compute(d);
      if (Dl_[g].info() != Eigen::Success) {
        ok[g] = 0;
        return;
      }
      if (I_.nborder > 0) {
        U_[g] = Dl_[g].solve(B_[g]);
        partial[t].noalias() += B_[g].transpose() * U_[g];
      }
    });
    for (char c : ok)
      if (!c) return false;
    if (I_.nborder > 0) {
      Mat S = E_;
      for (const auto& p : partial) S -= p;
      if (reg > 0) S.diagonal().array() += reg * std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
      Sl_.compute(S);
      if (Sl_.info() != Eigen::Success) return false;
    }
    return true;
  }

  Vec solve(const Vec& r) const {
    int G = static_cast<int>(D_.size());
    std::vector<Vec> rg(G);
    for (int g = 0; g < G; ++g) rg[g] = Vec::Zero(I_.group_size[g]);
    Vec rb = Vec::Zero(I_.nborder);
    for (int i = 0; i < I_.m; ++i) {
      if (I_.group[i] < 0)
        rb(I_.local[i]) = r(i);
      else
        rg[I_.group[i]](I_.local[i]) = r(i);
    }
    std::vector<Vec> zg(G);
    Vec yb = Vec::Zero(I_.nborder);
    if (I_.nborder > 0) {
      Vec t = rb;
      for (int g = 0; g < G; ++g) t -= U_[g].transpose() * rg[g];
      yb = Sl_.solve(t);
    }
    for (int g = 0; g < G; ++g) {
      Vec t = rg[g];
      if (I_.nborder > 0) t -= B_[g] * yb;
      zg[g] = Dl_[g].solve(t);
    }
    Vec y(I_.m);
    for (int i = 0; i < I_.m; ++i) y(i) = I_.group[i] < 0 ? yb(I_.local[i]) : zg[I_.group[i]](I_.local[i]);
    return y;
  }

  // Product with the assembled (unregularized) matrix.
  Vec multiply(const Vec& x) const {
    int G = static_cast<int>(D_.size());
    std::vector<Vec> xg(G);
    for (int g = 0; g < G; ++g) xg[g] = Vec::Zero(I_.group_size[g]);
    Vec xb = Vec::Zero(I_.nborder);
    for (int i = 0; i < I_.m; ++i) {
      if (I_.group[i] < 0)
        xb(I_.local[i]) = x(i);
      else
        xg[I_.group[i]](I_.local[i]) = x(i);
    }
    Vec yb = Vec::Zero(I_.nborder);
    if (I_.nborder > 0) yb = E_ * xb;
    std::vector<Vec> yg(G);
    for (int g = 0; g < G; ++g) {
      yg[g] = D_[g] * xg[g];
      if (I_.nborder > 0) {
        yg[g] += B_[g] * xb;
        yb += B_[g].transpose() * xg[g];
      }
    }
    Vec y(I_.m);
    for (int i = 0; i < I_.m; ++i) y(i) = I_.group[i] < 0 ? yb(I_.local[i]) : yg[I_.group[i]](I_.local[i]);
    return y;
  }

  Vec refined_solve(const Vec& r, int rounds) const {
    Vec x = solve(r);
    for (int k = 0; k < rounds; ++k) x += solve(r - multiply(x));
    return x;
  }

 private:
  const Internal& I_;
  std::vector<Mat> D_, B_;
  Mat E_;
  std::vector<Eigen::LLT<Mat>> Dl_;
  std::vector<Mat> U_;
  Eigen::LLT<Mat> Sl_;
};

using Blocks = std::vector<Mat>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double fro(const Blocks& a) { return std::sqrt(inner(a, a)); }

// A(X) = [<A_i, X>]
Vec apply_A(const Internal& I, const Blocks& X) {
  Vec r = Vec::Zero(I.m);
  for (std::size_t k = 0; k < I.blocks.size(); ++k)
    for (const auto& e : I.blocks[k].entries) r(e.row) += e.v * (e.p == e.q ? X[k](e.p, e.q) : 2 * X[k](e.p, e.q));
  return r;
}

// A^T(y) = sum y_i A_i
Blocks apply_At(const Internal& I, const Vec& y) {
  Blocks out;
  for (const auto& B : I.blocks) {
    Mat M = Mat::Zero(B.size, B.size);
    for (const auto& e : B.entries) {
      M(e.p, e.q) += y(e.row) * e.v;
      if (e.p != e.q) M(e.q, e.p) += y(e.row) * e.v;
    }
    out.push_back(std::move(M));
  }
  return out;
}

Blocks cost_matrix(const Internal& I) {
  Blocks out;
  for (const auto& B : I.blocks) {
    Mat M = Mat::Zero(B.size, B.size);
    for (const auto& e : B.cost) {
      M(e.p, e.q) += e.v;
      if (e.p != e.q) M(e.q, e.p) += e.v;
    }
    out.push_back(std::move(M));
  }
  return out;
}

// Fills the Schur matrix sum_b <A_i, W_b A_j W_b>.
void assemble(const Internal& I, const Blocks& W, Schur& S) {
  S.zero();
  for (std::size_t k = 0; k < I.blocks.size(); ++k) {
    const Block& B = I.blocks[k];
    const Mat& w = W[k];
    int s = B.size;
    if (s == 1) {
      double w2 = w(0, 0) * w(0, 0);
      for (std::size_t a = 0; a < B.rows.size(); ++a) {
        double va = 0;
        for (int t = B.row_begin[a]; t < B.row_begin[a + 1]; ++t) va += B.entries[t].v;
        for (std::size_t c = a; c < B.rows.size(); ++c) {
          double vc = 0;
          for (int t = B.row_begin[c]; t < B.row_begin[c + 1]; ++t) vc += B.entries[t].v;
          S.add(B.rows[a], B.rows[c], va * vc * w2);
        }
      }
      continue;
    }
    Mat T(s, s);
    for (std::size_t c = 0; c < B.rows.size(); ++c) {
      T.setZero();
      for (int t = B.row_begin[c]; t < B.row_begin[c + 1]; ++t) {
        const Entry& e = B.entries[t];
        if (e.p == e.q) {
          T.noalias() += e.v * w.col(e.p) * w.col(e.p).transpose();
        } else {
          T.noalias() += e.v * w.col(e.p) * w.col(e.q).transpose();
          T.noalias() += e.v * w.col(e.q) * w.col(e.p).transpose();
        }
      }
      for (std::size_t a = 0; a <= c; ++a) {
        double v = 0;
        for (int t = B.row_begin[a]; t < B.row_begin[a + 1]; ++t) {
          const Entry& e = B.entries[t];
          v += e.p == e.q ? e.v * T(e.p, e.p) : 2 * e.v * T(e.p, e.q);
        }
        S.add(B.rows[a], B.rows[c], v);
      }
    }
  }
}

// Largest step in (0, inf] keeping X + a dX PSD, given the Cholesky factor of X.
double max_step(const Mat& L, const Mat& dX) {
  if (L.rows() == 1) {
    double x = L(0, 0) * L(0, 0);
    return dX(0, 0) < 0 ? -x / dX(0, 0) : std::numeric_limits<double>::infinity();
  }
  Mat Li = L.triangularView<Eigen::Lower>().solve(Mat::Identity(L.rows(), L.rows()));
  Mat K = Li * dX * Li.transpose();
  K = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(K, Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()(0);
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

struct Scaling {
  Mat G, Ginv, W;
  Vec d;
  Mat Lx;  // Cholesky of X
  Mat Lz;  // Cholesky of Z
};

bool nt_scaling(const Mat& X, const Mat& Z, Scaling& sc) {
  int s = static_cast<int>(X.rows());
  if (s == 1) {
    if (X(0, 0) <= 0 || Z(0, 0) <= 0) return false;
    double x = X(0, 0), z = Z(0, 0);
    sc.Lx = Mat::Constant(1, 1, std::sqrt(x));
    sc.Lz = Mat::Constant(1, 1, std::sqrt(z));
    sc.d = Vec::Constant(1, std::sqrt(x * z));
    sc.G = Mat::Constant(1, 1, std::sqrt(std::sqrt(x / z)));
    sc.Ginv = Mat::Constant(1, 1, 1.0 / sc.G(0, 0));
    sc.W = Mat::Constant(1, 1, std::sqrt(x / z));
    return true;
  }
  Eigen::LLT<Mat> lx(X), lz(Z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  sc.Lx = lx.matrixL();
  sc.Lz = lz.matrixL();
  Mat RtL = sc.Lz.transpose() * sc.Lx;
  Eigen::BDCSVD<Mat> svd(RtL, Eigen::ComputeFullU | Eigen::ComputeFullV);
  sc.d = svd.singularValues();
  if (sc.d.minCoeff() <= 0) return false;
  Vec isq = sc.d.array().rsqrt();
  Vec sq = sc.d.array().sqrt();
  sc.G = sc.Lx * svd.matrixV() * isq.asDiagonal();
  Mat Linv = sc.Lx.triangularView<Eigen::Lower>().solve(Mat::Identity(s, s));
  sc.Ginv = sq.asDiagonal() * svd.matrixV().transpose() * Linv;
  sc.W = sc.G * sc.G.transpose();
  return true;
}

}  // namespace

SdpSolution solve(const SdpProblem& P, const SdpParams& params) {
  SdpSolution out;
  Internal I = build_internal(P);
  const int nb = static_cast<int>(I.blocks.size());
  Blocks C = cost_matrix(I);
  Schur S(I);

  // initial point
  Blocks X(nb), Z(nb);
  Vec y = Vec::Zero(I.m);
  double normC = fro(C), normb = I.b.norm();
  {
    std::vector<double> normA(I.m, 0);
    for (const auto& B : I.blocks)
      for (const auto& e : B.entries) normA[e.row] += e.v * e.v * (e.p == e.q ? 1 : 2);
    for (auto& v : normA) v = std::sqrt(v);
    for (int k = 0; k < nb; ++k) {
      const Block& B = I.blocks[k];
      double n = B.size;
      double xi = std::max(10.0, std::sqrt(n)), eta = std::max(10.0, std::sqrt(n));
      for (int r : B.rows) {
        xi = std::max(xi, n * (1 + std::abs(I.b(r))) / (1 + normA[r]));
        eta = std::max(eta, normA[r]);
      }
      eta = std::max(eta, C[k].norm());
      X[k] = xi * Mat::Identity(B.size, B.size);
      Z[k] = eta * Mat::Identity(B.size, B.size);
    }
  }
  double N = 0;
  for (const auto& B : I.blocks) N += B.size;

  std::vector<Scaling> sc(nb);
  SdpStatus status = SdpStatus::IterationLimit;
  int iter = 0;
  double pobj = 0, dobj = 0, relgap = 0, pinf = 0, dinf = 0;
  int stall = 0;
  double best_merit = std::numeric_limits<double>::infinity();
  for (;; ++iter) {
    Vec Rp = I.b - apply_A(I, X);
    Blocks AtY = apply_At(I, y);
    Blocks Rd(nb);
    for (int k = 0; k < nb; ++k) Rd[k] = C[k] - AtY[k] - Z[k];
    pobj = inner(C, X);
    dobj = I.b.dot(y);
    double XZ = inner(X, Z);
    relgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    relgap = std::max(relgap, XZ / (1 + std::abs(pobj) + std::abs(dobj)));
    pinf = Rp.norm() / (1 + normb);
    dinf = fro(Rd) / (1 + normC);
    if (params.verbose)
      std::fprintf(stderr, "iter %3d pobj %+.10e dobj %+.10e gap %.2e pinf %.2e dinf %.2e\n", iter, pobj, dobj,
                   relgap, pinf, dinf);
    if (relgap <= params.gap_tol && pinf <= params.feas_tol && dinf <= params.feas_tol) {
      status = SdpStatus::Optimal;
      break;
    }
    if (std::abs(dobj) > 1e12 * (1 + std::abs(pobj)) || std::abs(pobj) > 1e12 * (1 + std::abs(dobj)) ||
        !std::isfinite(pobj) || !std::isfinite(dobj)) {
      status = SdpStatus::Infeasible;
      break;
    }
    if (iter >= params.max_iter) {
      status = SdpStatus::IterationLimit;
      break;
    }
    double merit = std::max({relgap, pinf, dinf});
    if (merit < 0.5 * best_merit) {
      best_merit = merit;
      stall = 0;
    } else if (++stall > 12) {
      status = merit < 1e3 * std::max(params.gap_tol, params.feas_tol) ? SdpStatus::Optimal
                                                                         : SdpStatus::NumericalTrouble;
      break;
    }
    double mu = XZ / N;

    bool ok = true;
    Blocks W(nb);
    for (int k = 0; k < nb && ok; ++k) {
      ok = nt_scaling(X[k], Z[k], sc[k]);
      if (ok) W[k] = sc[k].W;
    }
    if (!ok) {
      status = SdpStatus::NumericalTrouble;
      break;
    }
    assemble(I, W, S);
    bool factored = false;
    for (double reg : {0.0, 1e-14, 1e-12, 1e-10, 1e-8}) {
      if (S.factor(reg)) {
        factored = true;
        break;
      }
    }
    if (!factored) {
      status = SdpStatus::NumericalTrouble;
      break;
    }
    Blocks WRdW(nb);
    for (int k = 0; k < nb; ++k) WRdW[k] = W[k] * Rd[k] * W[k];

    // Direction for a scaled complementarity right-hand side per block.
    auto direction = [&](const Blocks& rhs, Blocks& dX, Vec& dy, Blocks& dZ) {
      Blocks Rc(nb);
      for (int k = 0; k < nb; ++k) {
        const Vec& d = sc[k].d;
        int s = static_cast<int>(d.size());
        Mat T(s, s);
        for (int a = 0; a < s; ++a)
          for (int c = 0; c < s; ++c) T(a, c) = 2 * rhs[k](a, c) / (d(a) + d(c));
        Rc[k] = sc[k].G * T * sc[k].G.transpose();
      }
      Blocks tmp(nb);
      for (int k = 0; k < nb; ++k) tmp[k] = Rc[k] - WRdW[k];
      dy = S.refined_solve(Rp - apply_A(I, tmp), 2);
      Blocks Aty = apply_At(I, dy);
      dX.assign(nb, Mat());
      dZ.assign(nb, Mat());
      for (int k = 0; k < nb; ++k) {
        dZ[k] = Rd[k] - Aty[k];
        dX[k] = Rc[k] - W[k] * dZ[k] * W[k];
        dX[k] = 0.5 * (dX[k] + dX[k].transpose());
      }
    };
    auto steps = [&](const Blocks& dX, const Blocks& dZ, double& ap, double& ad) {
      ap = ad = std::numeric_limits<double>::infinity();
      for (int k = 0; k < nb; ++k) {
        ap = std::min(ap, max_step(sc[k].Lx, dX[k]));
        ad = std::min(ad, max_step(sc[k].Lz, dZ[k]));
      }
    };

    // predictor
    Blocks rhs(nb);
    for (int k = 0; k < nb; ++k) {
      rhs[k] = Mat::Zero(sc[k].d.size(), sc[k].d.size());
      rhs[k].diagonal() = -sc[k].d.array().square().matrix();
    }
    Blocks dXa, dZa;
    Vec dya;
    direction(rhs, dXa, dya, dZa);
    double ap, ad;
    steps(dXa, dZa, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double xz_aff = 0;
    for (int k = 0; k < nb; ++k) xz_aff += ((X[k] + ap * dXa[k]).array() * (Z[k] + ad * dZa[k]).array()).sum();
    double sigma = std::pow(std::max(0.0, xz_aff) / XZ, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // corrector
    for (int k = 0; k < nb; ++k) {
      Mat dXs = sc[k].Ginv * dXa[k] * sc[k].Ginv.transpose();
      Mat dZs = sc[k].G.transpose() * dZa[k] * sc[k].G;
      Mat prod = dXs * dZs;
      Mat sym = 0.5 * (prod + prod.transpose());
      Mat target = sigma * mu * Mat::Identity(sc[k].d.size(), sc[k].d.size());
      target.diagonal() -= sc[k].d.array().square().matrix();
      rhs[k] = target - sym;
    }
    Blocks dX, dZ;
    Vec dy;
    direction(rhs, dX, dy, dZ);
    steps(dX, dZ, ap, ad);
    ap = std::min(1.0, 0.98 * ap);
    ad = std::min(1.0, 0.98 * ad);
    for (int k = 0; k < nb; ++k) {
      X[k] += ap * dX[k];
      Z[k] += ad * dZ[k];
      X[k] = 0.5 * (X[k] + X[k].transpose());
      Z[k] = 0.5 * (Z[k] + Z[k].transpose());
    }
    y += ad * dy;
  }

  // map back to SDPA conventions
  out.status = status;
  out.iterations = iter;
  out.relative_gap = relgap;
  out.primal_infeasibility = dinf;
  out.dual_infeasibility = pinf;
  out.x = -y;
  out.primal_objective = -dobj;
  out.dual_objective = -pobj;
  for (int s : P.block_sizes) {
    out.X.push_back(Mat::Zero(std::abs(s), std::abs(s)));
    out.Y.push_back(Mat::Zero(std::abs(s), std::abs(s)));
  }
  for (int k = 0; k < nb; ++k) {
    auto [blk, off] = I.origin[k];
    if (I.diagonal_origin[k]) {
      out.Y[blk](off, off) = X[k](0, 0);
      out.X[blk](off, off) = Z[k](0, 0);
    } else {
      out.Y[blk] = X[k];
      out.X[blk] = Z[k];
    }
  }
  return out;
}

void project_dual(const SdpProblem& P, std::vector<Eigen::MatrixXd>& Y) {
  Internal I = build_internal(P);
  const int nb = static_cast<int>(I.blocks.size());
  Blocks X(nb), Wid(nb);
  for (int k = 0; k < nb; ++k) {
    auto [blk, off] = I.origin[k];
    X[k] = I.diagonal_origin[k] ? Mat::Constant(1, 1, Y[blk](off, off)) : Y[blk];
    Wid[k] = Mat::Identity(I.blocks[k].size, I.blocks[k].size);
  }
  Schur S(I);
  assemble(I, Wid, S);
  bool ok = false;
  for (double reg : {0.0, 1e-15, 1e-13, 1e-11})
    if (S.factor(reg)) {
      ok = true;
      break;
    }
  if (!ok) return;
  for (int round = 0; round < 2; ++round) {
    Vec r = I.b - apply_A(I, X);
    Vec z = S.solve(r);
    Blocks corr = apply_At(I, z);
    for (int k = 0; k < nb; ++k) X[k] += corr[k];
  }
  for (int k = 0; k < nb; ++k) {
    auto [blk, off] = I.origin[k];
    if (I.diagonal_origin[k])
      Y[blk](off, off) = X[k](0, 0);
    else
      Y[blk] = X[k];
  }
}

}  // namespace roundoff
