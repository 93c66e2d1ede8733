#ifndef PARLAB_COMMON_HPP
#define PARLAB_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace parlab {

using Real = double;
using Index = std::int64_t;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;

// ---------------------------------------------------------------------------
// Error taxonomy. Every failure mode named by the public operations maps to
// one of these; all derive from Error so callers can catch coarsely.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define PARLAB_DEFINE_ERROR(Name)                                         \
    struct Name : Error {                                                 \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

PARLAB_DEFINE_ERROR(InvalidWarp);
PARLAB_DEFINE_ERROR(InvalidFraction);
PARLAB_DEFINE_ERROR(QuadratureFailure);
PARLAB_DEFINE_ERROR(MeshingFailure);
PARLAB_DEFINE_ERROR(DisconnectedMesh);
PARLAB_DEFINE_ERROR(RadiusOutOfRange);
PARLAB_DEFINE_ERROR(IoError);
PARLAB_DEFINE_ERROR(ParseError);
PARLAB_DEFINE_ERROR(InvariantViolation);
PARLAB_DEFINE_ERROR(SingularSystem);
PARLAB_DEFINE_ERROR(SolverDivergence);
PARLAB_DEFINE_ERROR(MonotonicityViolation);
PARLAB_DEFINE_ERROR(InsufficientData);
PARLAB_DEFINE_ERROR(MeshMismatch);
PARLAB_DEFINE_ERROR(EmptyBoundary);
PARLAB_DEFINE_ERROR(ObtuseMeshUnsupported);
PARLAB_DEFINE_ERROR(NonAbsorbingConfiguration);
PARLAB_DEFINE_ERROR(PreconditionViolated);
PARLAB_DEFINE_ERROR(HypothesisViolation);
PARLAB_DEFINE_ERROR(ConfigError);

#undef PARLAB_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Small dense 2-D helpers. Triangle-local work never needs more than this;
// Eigen is reserved for the sparse systems.
// ---------------------------------------------------------------------------

struct Vec2 {
    Real x = 0, y = 0;

    Vec2() = default;
    Vec2(Real x_, Real y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(Real s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
};

inline Vec2 operator*(Real s, const Vec2& v) { return v * s; }
inline Real dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline Real cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline Real norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
// 90-degree counter-clockwise rotation.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

// Symmetric positive-definite 2x2 matrix [[a, b], [b, c]].
struct SymMat2 {
    Real a = 1, b = 0, c = 1;

    static SymMat2 identity() { return {1, 0, 1}; }

    Real det() const { return a * c - b * b; }

    Vec2 mul(const Vec2& v) const { return {a * v.x + b * v.y, b * v.x + c * v.y}; }

    SymMat2 inverse() const {
        const Real d = det();
        if (!(d > 0)) throw InvariantViolation("metric determinant must be positive");
        return {c / d, -b / d, a / d};
    }

    // v' M w
    Real quad(const Vec2& v, const Vec2& w) const { return dot(v, mul(w)); }
    Real quad(const Vec2& v) const { return quad(v, v); }
};

inline bool finite(Real x) { return std::isfinite(x); }

inline Real sq(Real x) { return x * x; }

} // namespace parlab

#endif
