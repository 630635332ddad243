#ifndef GNEPVI_GEOMETRY_HPP
#define GNEPVI_GEOMETRY_HPP

#include "gnepvi/types.hpp"

#include <memory>
#include <variant>
#include <vector>

namespace gnepvi {

/// Compact convex subset of R^d built from boxes, H-polytopes, balls and
/// finite intersections. All sets are closed; problem files must describe
/// bounded sets (validate_bounded enforces this at load time).
class ConvexBody {
 public:
  struct Box {
    Vec lower;
    Vec upper;
  };
  struct HPolytope {
    Mat A;  // m x d
    Vec b;  // m
  };
  struct Ball {
    Vec center;
    double radius = 0.0;
  };
  using Intersection = std::vector<ConvexBody>;
  using Node = std::variant<Box, HPolytope, Ball, Intersection>;

  static ConvexBody box(Vec lower, Vec upper);
  static ConvexBody hpolytope(Mat A, Vec b);
  static ConvexBody ball(Vec center, double radius);
  static ConvexBody intersection(std::vector<ConvexBody> members);
  /// Canonical empty body in R^d (infeasible one-row polytope).
  static ConvexBody empty(int dim);

  int dim() const { return dim_; }
  const Node& node() const { return *node_; }

 private:
  ConvexBody(Node n, int d);
  std::shared_ptr<const Node> node_;
  int dim_ = 0;
};

/// Flat view of a body: every box expands to bound rows only on demand.
struct Halfspace {
  Vec a;
  double b;
};
struct PieceSet {
  std::vector<Vec> box_lower, box_upper;
  std::vector<Halfspace> halfspaces;
  std::vector<ConvexBody::Ball> balls;
  bool forced_empty = false;  // contains a canonical empty member
};
PieceSet collect_pieces(const ConvexBody& X);

/// Halfspace rows covering the polyhedral part (boxes expanded); balls excluded.
void polyhedral_rows(const PieceSet& pieces, int dim, Mat& A, Vec& b);

struct LinMinResult {
  Vec minimizer;
  double value = 0.0;
};

/// True iff z lies within distance-like slack tol of X (each defining
/// inequality relaxed by tol).
bool contains(const ConvexBody& X, const Vec& z, double tol);

/// Euclidean projection onto X. Alternating Dykstra sweeps over the simple
/// pieces with an exact active-set polish for polyhedral sets.
Vec project(const ConvexBody& X, const Vec& z);

/// Minimize <c, y> over X; exact LP for polyhedral sets, analytic for balls,
/// cutting planes when balls mix with other pieces.
LinMinResult linmin(const ConvexBody& X, const Vec& c);

/// The player-nu slice { z : (z, rivals) in X } as a body in R^{n_nu}.
ConvexBody slice(const ConvexBody& X, const BlockStructure& blocks, int player,
                 const Vec& rivals);

/// Componentwise bounding box via 2d axis linmin calls.
ConvexBody::Box bounding_box(const ConvexBody& X);

/// Certified emptiness test (phase-1 LP plus ball cutting planes).
bool is_empty(const ConvexBody& X);

/// Throws ModelError when some signed coordinate direction is unbounded.
void validate_bounded(const ConvexBody& X);

}  // namespace gnepvi

#endif
