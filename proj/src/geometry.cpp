#include "gnepvi/geometry.hpp"

#include "gnepvi/errors.hpp"
#include "gnepvi/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gnepvi {
namespace {

constexpr double kDykstraMoveTol = 1e-10;
constexpr int kDykstraMaxSweeps = 10000;
constexpr double kActiveTol = 1e-7;
constexpr double kKktTol = 1e-12;
constexpr double kBallCutTol = 1e-12;
constexpr int kKelleyMaxIters = 200;

Vec clamp_to_box(const Vec& z, const Vec& lo, const Vec& hi) {
  return z.cwiseMax(lo).cwiseMin(hi);
}

Vec project_ball(const Vec& z, const ConvexBody::Ball& ball) {
  const Vec d = z - ball.center;
  const double n = d.norm();
  if (n <= ball.radius) return z;
  if (n == 0.0) return ball.center;
  return ball.center + (ball.radius / n) * d;
}

Vec project_halfspace(const Vec& z, const Halfspace& h) {
  const double viol = h.a.dot(z) - h.b;
  if (viol <= 0.0) return z;
  return z - (viol / h.a.squaredNorm()) * h.a;
}

// Exact projection onto the polyhedron {Ax <= b} given a near-solution guess:
// identify active rows, solve the equality-constrained least squares KKT
// system, and verify primal feasibility plus multiplier signs.
bool polish_projection(const Mat& A, const Vec& b, const Vec& z, Vec& y) {
  const int m = static_cast<int>(A.rows());
  std::vector<bool> active(static_cast<std::size_t>(m), false);
  for (int i = 0; i < m; ++i)
    active[static_cast<std::size_t>(i)] = (A.row(i).dot(y) >= b[i] - kActiveTol);

  for (int pass = 0; pass < 2 * m + 5; ++pass) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (active[static_cast<std::size_t>(i)]) idx.push_back(i);

    Vec cand = z;
    Vec lambda;
    if (!idx.empty()) {
      Mat Aa(static_cast<int>(idx.size()), A.cols());
      Vec ba(static_cast<int>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) {
        Aa.row(static_cast<int>(k)) = A.row(idx[k]);
        ba[static_cast<int>(k)] = b[idx[k]];
      }
      // cand = z - Aa' lambda with Aa cand = ba; least-squares multipliers
      // handle redundant active rows.
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(Aa * Aa.transpose());
      lambda = cod.solve(Aa * z - ba);
      cand = z - Aa.transpose() * lambda;

      int drop = -1;
      double most_negative = -kKktTol;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (lambda[static_cast<int>(k)] < most_negative) {
          most_negative = lambda[static_cast<int>(k)];
          drop = idx[k];
        }
      }
      if (drop >= 0) {
        active[static_cast<std::size_t>(drop)] = false;
        continue;
      }
    }

    int add = -1;
    double worst = 1e-11;
    for (int i = 0; i < m; ++i) {
      const double viol = A.row(i).dot(cand) - b[i];
      if (viol > worst) {
        worst = viol;
        add = i;
      }
    }
    if (add >= 0) {
      if (active[static_cast<std::size_t>(add)]) return false;  // no progress possible
      active[static_cast<std::size_t>(add)] = true;
      continue;
    }
    y = cand;
    return true;
  }
  return false;
}

struct SimplePiece {
  enum Kind { BoxKind, BallKind, HalfspaceKind } kind;
  Vec lo, hi;
  ConvexBody::Ball ball;
  Halfspace half;
};

std::vector<SimplePiece> simple_pieces(const PieceSet& ps) {
  std::vector<SimplePiece> out;
  for (std::size_t i = 0; i < ps.box_lower.size(); ++i)
    out.push_back({SimplePiece::BoxKind, ps.box_lower[i], ps.box_upper[i], {}, {}});
  for (const auto& b : ps.balls) out.push_back({SimplePiece::BallKind, {}, {}, b, {}});
  for (const auto& h : ps.halfspaces) out.push_back({SimplePiece::HalfspaceKind, {}, {}, {}, h});
  return out;
}

Vec project_piece(const SimplePiece& p, const Vec& z) {
  switch (p.kind) {
    case SimplePiece::BoxKind:
      return clamp_to_box(z, p.lo, p.hi);
    case SimplePiece::BallKind:
      return project_ball(z, p.ball);
    case SimplePiece::HalfspaceKind:
      return project_halfspace(z, p.half);
  }
  return z;
}

ConvexBody::Box box_from_balls_and_boxes(const PieceSet& ps, int dim) {
  Vec lo = Vec::Constant(dim, -std::numeric_limits<double>::infinity());
  Vec hi = Vec::Constant(dim, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ps.box_lower.size(); ++i) {
    lo = lo.cwiseMax(ps.box_lower[i]);
    hi = hi.cwiseMin(ps.box_upper[i]);
  }
  for (const auto& b : ps.balls) {
    lo = lo.cwiseMax(b.center.array() - b.radius);
    hi = hi.cwiseMin(b.center.array() + b.radius);
  }
  return {lo, hi};
}

// Rows for the polyhedral relaxation, including finite bounds implied by balls
// so Kelley sub-LPs stay bounded.
void kelley_base_rows(const PieceSet& ps, int dim, Mat& A, Vec& b) {
  polyhedral_rows(ps, dim, A, b);
  if (ps.balls.empty()) return;
  const auto bb = box_from_balls_and_boxes(ps, dim);
  Mat A2(A.rows() + 2 * dim, dim);
  Vec b2(A.rows() + 2 * dim);
  A2.topRows(A.rows()) = A;
  b2.head(A.rows()) = b;
  for (int i = 0; i < dim; ++i) {
    Vec row = Vec::Zero(dim);
    row[i] = 1.0;
    A2.row(A.rows() + 2 * i) = row.transpose();
    b2[A.rows() + 2 * i] = bb.upper[i];
    A2.row(A.rows() + 2 * i + 1) = -row.transpose();
    b2[A.rows() + 2 * i + 1] = -bb.lower[i];
  }
  A = std::move(A2);
  b = std::move(b2);
}

double max_ball_violation(const PieceSet& ps, const Vec& y) {
  double v = 0.0;
  for (const auto& b : ps.balls) v = std::max(v, (y - b.center).norm() - b.radius);
  return v;
}

void append_row(Mat& A, Vec& b, const Vec& row, double rhs) {
  A.conservativeResize(A.rows() + 1, Eigen::NoChange);
  b.conservativeResize(b.size() + 1);
  A.row(A.rows() - 1) = row.transpose();
  b[b.size() - 1] = rhs;
}

}  // namespace

BlockStructure::BlockStructure(std::vector<int> d) : dims(std::move(d)) {
  if (dims.empty()) throw UsageError("BlockStructure: at least one player required");
  offsets_.reserve(dims.size());
  for (int nd : dims) {
    if (nd <= 0) throw UsageError("BlockStructure: player dimensions must be positive");
    offsets_.push_back(total_);
    total_ += nd;
  }
}

Vec BlockStructure::own_block(int player, const Vec& x) const {
  return x.segment(offset(player), dim(player));
}

Vec BlockStructure::rival_block(int player, const Vec& x) const {
  Vec r(total_ - dim(player));
  const int off = offset(player);
  r.head(off) = x.head(off);
  r.tail(total_ - off - dim(player)) = x.tail(total_ - off - dim(player));
  return r;
}

Vec BlockStructure::assemble(int player, const Vec& own, const Vec& rivals) const {
  if (own.size() != dim(player) || rivals.size() != total_ - dim(player))
    throw UsageError("BlockStructure::assemble: dimension mismatch");
  Vec x(total_);
  const int off = offset(player);
  x.head(off) = rivals.head(off);
  x.segment(off, dim(player)) = own;
  x.tail(total_ - off - dim(player)) = rivals.tail(total_ - off - dim(player));
  return x;
}

TagVector BlockStructure::rival_tags(int player, const TagVector& tags) const {
  if (tags.empty()) return all_q_tags(total_ - dim(player));
  TagVector r;
  r.reserve(static_cast<std::size_t>(total_ - dim(player)));
  const int off = offset(player);
  for (int i = 0; i < total_; ++i) {
    if (i < off || i >= off + dim(player)) r.push_back(tags[static_cast<std::size_t>(i)]);
  }
  return r;
}

TagVector BlockStructure::assemble_tags(int player, const TagVector& own,
                                        const TagVector& rivals) const {
  TagVector x(static_cast<std::size_t>(total_), Tag::Q);
  const int off = offset(player);
  for (int i = 0; i < off; ++i) x[static_cast<std::size_t>(i)] = rivals[static_cast<std::size_t>(i)];
  for (int i = 0; i < dim(player); ++i)
    x[static_cast<std::size_t>(off + i)] = own.empty() ? Tag::Q : own[static_cast<std::size_t>(i)];
  for (int i = off + dim(player); i < total_; ++i)
    x[static_cast<std::size_t>(i)] = rivals[static_cast<std::size_t>(i - dim(player))];
  return x;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return a.size() < b.size();
}

ConvexBody::ConvexBody(Node n, int d) : node_(std::make_shared<const Node>(std::move(n))), dim_(d) {}

ConvexBody ConvexBody::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || lower.size() == 0)
    throw UsageError("ConvexBody::box: bad bounds");
  if (((upper - lower).array() < 0).any())
    throw ModelError("ConvexBody::box: lower exceeds upper");
  const int d = static_cast<int>(lower.size());
  return ConvexBody(Box{std::move(lower), std::move(upper)}, d);
}

ConvexBody ConvexBody::hpolytope(Mat A, Vec b) {
  if (A.rows() != b.size() || A.cols() == 0)
    throw UsageError("ConvexBody::hpolytope: bad shape");
  const int d = static_cast<int>(A.cols());
  return ConvexBody(HPolytope{std::move(A), std::move(b)}, d);
}

ConvexBody ConvexBody::ball(Vec center, double radius) {
  if (center.size() == 0) throw UsageError("ConvexBody::ball: bad center");
  if (radius < 0.0) throw ModelError("ConvexBody::ball: negative radius");
  const int d = static_cast<int>(center.size());
  return ConvexBody(Ball{std::move(center), radius}, d);
}

ConvexBody ConvexBody::intersection(std::vector<ConvexBody> members) {
  if (members.empty()) throw UsageError("ConvexBody::intersection: no members");
  const int d = members.front().dim();
  for (const auto& m : members)
    if (m.dim() != d) throw UsageError("ConvexBody::intersection: mixed dimensions");
  return ConvexBody(Intersection{std::move(members)}, d);
}

ConvexBody ConvexBody::empty(int dim) {
  Mat A = Mat::Zero(1, dim);
  Vec b(1);
  b[0] = -1.0;
  return hpolytope(std::move(A), std::move(b));
}

PieceSet collect_pieces(const ConvexBody& X) {
  PieceSet out;
  struct Walker {
    PieceSet& out;
    void walk(const ConvexBody& body) {
      std::visit(
          [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ConvexBody::Box>) {
              out.box_lower.push_back(node.lower);
              out.box_upper.push_back(node.upper);
            } else if constexpr (std::is_same_v<T, ConvexBody::HPolytope>) {
              for (int i = 0; i < node.A.rows(); ++i) {
                Vec a = node.A.row(i).transpose();
                if (a.cwiseAbs().maxCoeff() == 0.0 && node.b[i] < 0.0) out.forced_empty = true;
                out.halfspaces.push_back({std::move(a), node.b[i]});
              }
            } else if constexpr (std::is_same_v<T, ConvexBody::Ball>) {
              out.balls.push_back(node);
            } else {
              for (const auto& m : node) walk(m);
            }
          },
          body.node());
    }
  } walker{out};
  walker.walk(X);
  return out;
}

void polyhedral_rows(const PieceSet& pieces, int dim, Mat& A, Vec& b) {
  const int m = static_cast<int>(pieces.halfspaces.size()) +
                2 * dim * static_cast<int>(pieces.box_lower.size());
  A = Mat::Zero(m, dim);
  b = Vec::Zero(m);
  int r = 0;
  for (const auto& h : pieces.halfspaces) {
    A.row(r) = h.a.transpose();
    b[r] = h.b;
    ++r;
  }
  for (std::size_t k = 0; k < pieces.box_lower.size(); ++k) {
    for (int i = 0; i < dim; ++i) {
      A(r, i) = 1.0;
      b[r] = pieces.box_upper[k][i];
      ++r;
      A(r, i) = -1.0;
      b[r] = -pieces.box_lower[k][i];
      ++r;
    }
  }
}

bool contains(const ConvexBody& X, const Vec& z, double tol) {
  if (z.size() != X.dim()) throw UsageError("contains: dimension mismatch");
  return std::visit(
      [&](const auto& node) -> bool {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ConvexBody::Box>) {
          return ((z - node.lower).array() >= -tol).all() &&
                 ((node.upper - z).array() >= -tol).all();
        } else if constexpr (std::is_same_v<T, ConvexBody::HPolytope>) {
          return ((node.b - node.A * z).array() >= -tol).all();
        } else if constexpr (std::is_same_v<T, ConvexBody::Ball>) {
          return (z - node.center).norm() <= node.radius + tol;
        } else {
          for (const auto& m : node)
            if (!contains(m, z, tol)) return false;
          return true;
        }
      },
      X.node());
}

Vec project(const ConvexBody& X, const Vec& z) {
  if (z.size() != X.dim()) throw UsageError("project: dimension mismatch");
  if (const auto* box = std::get_if<ConvexBody::Box>(&X.node()))
    return clamp_to_box(z, box->lower, box->upper);
  if (const auto* ball = std::get_if<ConvexBody::Ball>(&X.node())) return project_ball(z, *ball);

  const PieceSet ps = collect_pieces(X);
  if (ps.forced_empty) throw ModelError("project: set is empty");
  const auto pieces = simple_pieces(ps);
  if (pieces.empty()) return z;

  Vec x = z;
  std::vector<Vec> corrections(pieces.size(), Vec::Zero(z.size()));
  for (int sweep = 0; sweep < kDykstraMaxSweeps; ++sweep) {
    const Vec prev = x;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Vec target = x + corrections[i];
      const Vec y = project_piece(pieces[i], target);
      corrections[i] = target - y;
      x = y;
    }
    if ((x - prev).norm() < kDykstraMoveTol) break;
  }

  if (ps.balls.empty()) {
    Mat A;
    Vec b;
    polyhedral_rows(ps, X.dim(), A, b);
    Vec y = x;
    if (polish_projection(A, b, z, y)) return y;
  }
  return x;
}

LinMinResult linmin(const ConvexBody& X, const Vec& c) {
  if (c.size() != X.dim()) throw UsageError("linmin: dimension mismatch");
  if (const auto* box = std::get_if<ConvexBody::Box>(&X.node())) {
    Vec y(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      y[i] = (c[i] > 0.0) ? box->lower[i] : (c[i] < 0.0 ? box->upper[i] : box->lower[i]);
    return {y, c.dot(y)};
  }
  if (const auto* ball = std::get_if<ConvexBody::Ball>(&X.node())) {
    const double n = c.norm();
    const Vec y = (n == 0.0) ? ball->center : Vec(ball->center - (ball->radius / n) * c);
    return {y, c.dot(y)};
  }

  const PieceSet ps = collect_pieces(X);
  if (ps.forced_empty) throw ModelError("linmin: set is empty");

  Mat A;
  Vec b;
  kelley_base_rows(ps, X.dim(), A, b);

  if (ps.balls.empty()) {
    const LpResult lp = solve_lp(c, A, b);
    if (lp.status == LpStatus::Unbounded)
      throw ModelError("linmin: unbounded direction detected");
    if (lp.status == LpStatus::Infeasible) throw ModelError("linmin: set is empty");
    return {lp.x, lp.value};
  }

  // Kelley cutting planes on the ball constraints.
  LinMinResult best;
  bool have_feasible = false;
  for (int iter = 0; iter < kKelleyMaxIters; ++iter) {
    const LpResult lp = solve_lp(c, A, b);
    if (lp.status == LpStatus::Infeasible) throw ModelError("linmin: set is empty");
    if (lp.status == LpStatus::Unbounded)
      throw ModelError("linmin: unbounded direction detected");
    const double viol = max_ball_violation(ps, lp.x);
    if (viol <= kBallCutTol) return {lp.x, lp.value};

    const Vec feas = project(X, lp.x);
    const double fval = c.dot(feas);
    if (!have_feasible || fval < best.value) {
      best = {feas, fval};
      have_feasible = true;
    }
    if (have_feasible && best.value - lp.value <= 1e-9) return best;

    for (const auto& ball : ps.balls) {
      const Vec d = lp.x - ball.center;
      const double n = d.norm();
      if (n > ball.radius + kBallCutTol && n > 0.0) {
        const Vec g = d / n;
        append_row(A, b, g, g.dot(ball.center) + ball.radius);
      }
    }
  }
  if (have_feasible) return best;
  throw NumericError("linmin: cutting-plane iteration did not converge");
}

ConvexBody slice(const ConvexBody& X, const BlockStructure& blocks, int player,
                 const Vec& rivals) {
  if (player < 0 || player >= blocks.players()) throw UsageError("slice: bad player index");
  if (X.dim() != blocks.total() || rivals.size() != blocks.total() - blocks.dim(player))
    throw UsageError("slice: dimension mismatch");
  const int off = blocks.offset(player);
  const int d = blocks.dim(player);
  const int n = blocks.total();

  return std::visit(
      [&](const auto& node) -> ConvexBody {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, ConvexBody::Box>) {
          for (int i = 0, r = 0; i < n; ++i) {
            if (i >= off && i < off + d) continue;
            if (rivals[r] < node.lower[i] - 1e-12 || rivals[r] > node.upper[i] + 1e-12)
              return ConvexBody::empty(d);
            ++r;
          }
          return ConvexBody::box(node.lower.segment(off, d), node.upper.segment(off, d));
        } else if constexpr (std::is_same_v<T, ConvexBody::HPolytope>) {
          Mat Ao(node.A.rows(), d);
          Vec bo = node.b;
          for (int i = 0, r = 0; i < n; ++i) {
            if (i >= off && i < off + d) {
              Ao.col(i - off) = node.A.col(i);
            } else {
              bo -= node.A.col(i) * rivals[r];
              ++r;
            }
          }
          return ConvexBody::hpolytope(std::move(Ao), std::move(bo));
        } else if constexpr (std::is_same_v<T, ConvexBody::Ball>) {
          Vec co(d);
          double rd2 = node.radius * node.radius;
          for (int i = 0, r = 0; i < n; ++i) {
            if (i >= off && i < off + d) {
              co[i - off] = node.center[i];
            } else {
              const double gap = rivals[r] - node.center[i];
              rd2 -= gap * gap;
              ++r;
            }
          }
          if (rd2 < -1e-12) return ConvexBody::empty(d);
          return ConvexBody::ball(std::move(co), std::sqrt(std::max(rd2, 0.0)));
        } else {
          std::vector<ConvexBody> members;
          members.reserve(node.size());
          for (const auto& m : node) {
            ConvexBody s = slice(m, blocks, player, rivals);
            const PieceSet ps = collect_pieces(s);
            if (ps.forced_empty) return ConvexBody::empty(d);
            members.push_back(std::move(s));
          }
          return ConvexBody::intersection(std::move(members));
        }
      },
      X.node());
}

ConvexBody::Box bounding_box(const ConvexBody& X) {
  const int d = X.dim();
  Vec lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    lo[i] = linmin(X, e).value;
    hi[i] = -linmin(X, -e).value;
  }
  return {lo, hi};
}

bool is_empty(const ConvexBody& X) {
  const PieceSet ps = collect_pieces(X);
  if (ps.forced_empty) return true;
  if (ps.halfspaces.empty() && ps.box_lower.empty()) {
    // Pure balls: nonempty iff pairwise centers are close enough.
    if (ps.balls.size() <= 1) return false;
    Vec mid = ps.balls.front().center;
    try {
      const Vec p = project(X, mid);
      return !contains(X, p, 1e-9);
    } catch (const ModelError&) {
      return true;
    }
  }

  Mat A;
  Vec b;
  polyhedral_rows(ps, X.dim(), A, b);
  for (std::size_t k = 0; k < ps.box_lower.size(); ++k)
    if (((ps.box_upper[k] - ps.box_lower[k]).array() < -1e-12).any()) return true;
  if (!lp_feasible(A, b)) return true;
  if (ps.balls.empty()) return false;

  // Minimize the worst ball violation over the polyhedral part (Kelley).
  kelley_base_rows(ps, X.dim(), A, b);
  const int d = X.dim();
  Mat At = Mat::Zero(A.rows(), d + 1);
  At.leftCols(d) = A;
  Vec bt = b;
  Vec ct = Vec::Zero(d + 1);
  ct[d] = 1.0;
  // t >= -1 keeps the LP bounded below.
  append_row(At, bt, [&] { Vec r = Vec::Zero(d + 1); r[d] = -1.0; return r; }(), 1.0);
  for (int iter = 0; iter < kKelleyMaxIters; ++iter) {
    const LpResult lp = solve_lp(ct, At, bt);
    if (lp.status != LpStatus::Optimal) return true;
    const Vec y = lp.x.head(d);
    if (lp.value > 1e-9) return true;  // certified lower bound on violation
    if (max_ball_violation(ps, y) <= 1e-9) return false;
    for (const auto& ball : ps.balls) {
      const Vec dd = y - ball.center;
      const double nn = dd.norm();
      if (nn > 0.0) {
        Vec row = Vec::Zero(d + 1);
        row.head(d) = dd / nn;
        row[d] = -1.0;
        append_row(At, bt, row, (dd / nn).dot(ball.center) + ball.radius);
      }
    }
  }
  return false;
}

void validate_bounded(const ConvexBody& X) {
  const int d = X.dim();
  for (int i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e[i] = 1.0;
    try {
      linmin(X, e);
      linmin(X, -e);
    } catch (const ModelError& err) {
      throw ModelError(std::string("validate_bounded: coordinate ") + std::to_string(i + 1) +
                       ": " + err.what());
    }
  }
}

}  // namespace gnepvi
