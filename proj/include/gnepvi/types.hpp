#ifndef GNEPVI_TYPES_HPP
#define GNEPVI_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace gnepvi {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Rationality marker carried alongside a coordinate value. Arithmetic always
/// uses the value; tags only drive explicit tag-branch dispatch.
enum class Tag : std::uint8_t { Q, I };

struct TaggedReal {
  double value = 0.0;
  Tag tag = Tag::Q;
};

using TagVector = std::vector<Tag>;

inline TagVector all_q_tags(Eigen::Index n) { return TagVector(static_cast<std::size_t>(n), Tag::Q); }

inline std::string tag_name(Tag t) { return t == Tag::Q ? "Q" : "I"; }

/// Per-player block partition of R^n: n = sum of dims.
struct BlockStructure {
  std::vector<int> dims;

  BlockStructure() = default;
  explicit BlockStructure(std::vector<int> d);

  int players() const { return static_cast<int>(dims.size()); }
  int total() const { return total_; }
  int offset(int player) const { return offsets_[static_cast<std::size_t>(player)]; }
  int dim(int player) const { return dims[static_cast<std::size_t>(player)]; }

  Vec own_block(int player, const Vec& x) const;
  Vec rival_block(int player, const Vec& x) const;
  /// Splice an own-block vector and the rival coordinates back into a full point.
  Vec assemble(int player, const Vec& own, const Vec& rivals) const;

  TagVector rival_tags(int player, const TagVector& tags) const;
  TagVector assemble_tags(int player, const TagVector& own, const TagVector& rivals) const;

 private:
  int total_ = 0;
  std::vector<int> offsets_;
};

bool lex_less(const Vec& a, const Vec& b);

}  // namespace gnepvi

#endif
