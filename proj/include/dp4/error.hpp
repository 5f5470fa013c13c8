#pragma once

#include <stdexcept>
#include <string>

namespace dp4 {

// Typed failure conditions surfaced by the library. The CLI maps
// ParseError/ValidationError to exit code 2 and everything else to 3.
enum class Errc {
    ZeroElement,
    NoExtensionLayer,
    ZeroForm,
    UnsupportedFactorDegree,
    UnexpectedRank,
    WrongRank,
    VertexOnHyperplane,
    NotOnQuadric,
    SingularPoint,
    RankNotTwo,
    OddExchangeSet,
    UnsupportedDegree,
    NonIntegralLift,
    NotFiniteOrder,
    GroupTooLarge,
    NotASubgroupImage,
    StarViolated,
    StepRejected,
    IndeterminateReduction,
    MissingTangentForm,
    ParseError,
    ValidationError,
    DomainMismatch,
    Unsupported,
    Internal,
};

inline const char* errcName(Errc c) {
    switch (c) {
        case Errc::ZeroElement: return "ZeroElement";
        case Errc::NoExtensionLayer: return "NoExtensionLayer";
        case Errc::ZeroForm: return "ZeroForm";
        case Errc::UnsupportedFactorDegree: return "UnsupportedFactorDegree";
        case Errc::UnexpectedRank: return "UnexpectedRank";
        case Errc::WrongRank: return "WrongRank";
        case Errc::VertexOnHyperplane: return "VertexOnHyperplane";
        case Errc::NotOnQuadric: return "NotOnQuadric";
        case Errc::SingularPoint: return "SingularPoint";
        case Errc::RankNotTwo: return "RankNotTwo";
        case Errc::OddExchangeSet: return "OddExchangeSet";
        case Errc::UnsupportedDegree: return "UnsupportedDegree";
        case Errc::NonIntegralLift: return "NonIntegralLift";
        case Errc::NotFiniteOrder: return "NotFiniteOrder";
        case Errc::GroupTooLarge: return "GroupTooLarge";
        case Errc::NotASubgroupImage: return "NotASubgroupImage";
        case Errc::StarViolated: return "StarViolated";
        case Errc::StepRejected: return "StepRejected";
        case Errc::IndeterminateReduction: return "IndeterminateReduction";
        case Errc::MissingTangentForm: return "MissingTangentForm";
        case Errc::ParseError: return "ParseError";
        case Errc::ValidationError: return "ValidationError";
        case Errc::DomainMismatch: return "DomainMismatch";
        case Errc::Unsupported: return "Unsupported";
        case Errc::Internal: return "Internal";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errcName(code)) + ": " + msg), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

}  // namespace dp4
