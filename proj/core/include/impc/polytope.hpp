#pragma once

#include "impc/linalg.hpp"
#include "impc/setalg.hpp"

#include <optional>
#include <vector>

namespace impc {

/// Polyhedron { x : H x <= b } in halfspace form.
class Polytope {
 public:
  Polytope() = default;
  Polytope(Matrix h, Vector b);

  /// Axis-aligned box; rows are ordered [I; -I].
  static Polytope box(const Vector& lower, const Vector& upper);
  static Polytope from_box(const setalg::Box& box);

  const Matrix& h() const noexcept { return h_; }
  const Vector& b() const noexcept { return b_; }
  Index dim() const noexcept { return h_.cols(); }
  Index num_constraints() const noexcept { return h_.rows(); }

  bool contains(const Vector& x, double tol = 1e-9) const;
  /// Every point of the box lies in the polytope.
  bool contains(const setalg::Box& box, double tol = 1e-9) const;

  /// max d'x over the polytope; nullopt if unbounded. Throws on empty polytopes.
  std::optional<double> support(const Vector& direction) const;
  bool is_empty() const;
  /// Componentwise extent of the polytope; throws if empty or unbounded.
  setalg::Box bounding_box() const;
  /// Drops constraints implied by the others (LP test per row).
  Polytope without_redundant(double tol = 1e-9) const;
  /// Vertices of a bounded 2-D polytope in counter-clockwise order.
  std::vector<Vector> vertices_2d() const;

 private:
  Matrix h_;
  Vector b_;
};

}  // namespace impc
