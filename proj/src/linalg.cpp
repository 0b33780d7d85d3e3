#include "crosslab/linalg.hpp"
#include "crosslab/error.hpp"

#include <algorithm>
#include <cmath>

namespace crosslab {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ZeroOrderUndetermined: return "ZeroOrderUndetermined";
        case ErrorCode::BracketingFailed: return "BracketingFailed";
        case ErrorCode::QuadratureTolExceeded: return "QuadratureTolExceeded";
        case ErrorCode::AnchorInsideCrossings: return "AnchorInsideCrossings";
        case ErrorCode::TailIntegralVanishes: return "TailIntegralVanishes";
        case ErrorCode::NewtonDiverged: return "NewtonDiverged";
        case ErrorCode::BranchAmbiguity: return "BranchAmbiguity";
        case ErrorCode::StepUnderflow: return "StepUnderflow";
        case ErrorCode::TailNotConverged: return "TailNotConverged";
        case ErrorCode::SeriesNotContracting: return "SeriesNotContracting";
        case ErrorCode::RegimeViolation: return "RegimeViolation";
        case ErrorCode::TurningPointFailure: return "TurningPointFailure";
        case ErrorCode::MStarTooSmall: return "MStarTooSmall";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NoMinimaFound: return "NoMinimaFound";
        case ErrorCode::PathCrossesForbiddenBand: return "PathCrossesForbiddenBand";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Mat2 Mat2::inverse() const {
    const cplx dt = det();
    return {d / dt, -b / dt, -c / dt, a / dt};
}

double norm(const Vec2& v) { return std::sqrt(std::norm(v.x) + std::norm(v.y)); }

double frobenius(const Mat2& m) {
    return std::sqrt(std::norm(m.a) + std::norm(m.b) + std::norm(m.c) + std::norm(m.d));
}

double max_abs(const Mat2& m) {
    return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

double unitarity_defect(const Mat2& m) { return max_abs(m.adjoint() * m - Mat2::identity()); }

Mat2 expm_traceless(const Mat2& m) {
    const cplx q = std::sqrt(-m.det());
    cplx c;
    cplx s;  // sinh(q)/q
    if (std::abs(q) < 1e-4) {
        const cplx q2 = q * q;
        c = 1.0 + q2 / 2.0 + q2 * q2 / 24.0;
        s = 1.0 + q2 / 6.0 + q2 * q2 / 120.0;
    } else {
        c = std::cosh(q);
        s = std::sinh(q) / q;
    }
    return c * Mat2::identity() + s * m;
}

Mat2 expm_hermitian_phase(double a, cplx b, double h) {
    const double z = std::sqrt(a * a + std::norm(b));
    const double arg = z / h;
    const double c = std::cos(arg);
    double s;  // sin(z/h)/z
    if (z == 0.0) {
        s = 1.0 / h;
    } else if (arg < 1e-4) {
        s = (1.0 - arg * arg / 6.0) / h;
    } else {
        s = std::sin(arg) / z;
    }
    const cplx is = -kI * s;
    return {c + is * a, is * b, is * std::conj(b), c - is * a};
}

}  // namespace crosslab
