#include "herglotz/coordinate.hpp"

#include <functional>

namespace herglotz {

std::string Coordinate::render() const {
  switch (kind_) {
    case Kind::Jet:
      return "q" + std::to_string(dof_) + "_" + std::to_string(level_);
    case Kind::Z:
      return "z";
    case Kind::Momentum:
      return "p" + std::to_string(level_) + "_" + std::to_string(dof_);
    case Kind::Unknown:
      return "F" + std::to_string(dof_) + "_" + std::to_string(level_);
    case Kind::Param:
      return name_;
  }
  return {};
}

std::strong_ordering operator<=>(const Coordinate& a, const Coordinate& b) {
  if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
  switch (a.kind_) {
    case Coordinate::Kind::Jet:
    case Coordinate::Kind::Unknown:
      // Order-major so that a jet layout reads q0_0, q1_0, q0_1, ...
      if (a.level_ != b.level_) return a.level_ <=> b.level_;
      return a.dof_ <=> b.dof_;
    case Coordinate::Kind::Momentum:
      if (a.level_ != b.level_) return a.level_ <=> b.level_;
      return a.dof_ <=> b.dof_;
    case Coordinate::Kind::Z:
      return std::strong_ordering::equal;
    case Coordinate::Kind::Param:
      return a.name_.compare(b.name_) <=> 0;
  }
  return std::strong_ordering::equal;
}

std::size_t Coordinate::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ull;
  h ^= static_cast<std::size_t>(dof_) * 1000003u + static_cast<std::size_t>(level_) * 7919u;
  if (kind_ == Kind::Param) h ^= std::hash<std::string>{}(name_);
  return h;
}

}  // namespace herglotz
