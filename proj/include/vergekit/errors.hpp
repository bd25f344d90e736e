#pragma once

#include <stdexcept>
#include <string>

namespace vergekit {

// Base of everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration or usage of an operation (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// A numerical procedure or fit could not produce a valid result (CLI exit code 3).
struct NumericError : Error {
    using Error::Error;
};

// Malformed or unreadable file content (CLI exit code 4).
struct IoError : Error {
    using Error::Error;
};

#define VERGEKIT_DEFINE_ERROR(name, base)                                     \
    struct name : base {                                                       \
        explicit name(const std::string& msg = #name) : base(msg) {}           \
    }

// core_geometry
VERGEKIT_DEFINE_ERROR(DegenerateRays, NumericError);
VERGEKIT_DEFINE_ERROR(BehindCamera, NumericError);
VERGEKIT_DEFINE_ERROR(ParallelRay, NumericError);
VERGEKIT_DEFINE_ERROR(BehindOrigin, NumericError);

// eye_simulation
VERGEKIT_DEFINE_ERROR(FixationBehindEyes, ConfigError);

// calibration
VERGEKIT_DEFINE_ERROR(InsufficientSamples, NumericError);
VERGEKIT_DEFINE_ERROR(NoConvergence, NumericError);
VERGEKIT_DEFINE_ERROR(DegenerateData, NumericError);
VERGEKIT_DEFINE_ERROR(RansacFailure, NumericError);
VERGEKIT_DEFINE_ERROR(SectorUnderpopulated, NumericError);
VERGEKIT_DEFINE_ERROR(EmptyStats, NumericError);
VERGEKIT_DEFINE_ERROR(DegenerateStats, NumericError);
VERGEKIT_DEFINE_ERROR(ImproperRotation, NumericError);
VERGEKIT_DEFINE_ERROR(MirrorDegenerate, NumericError);

// depth_estimation
VERGEKIT_DEFINE_ERROR(PupilOffSphere, NumericError);
VERGEKIT_DEFINE_ERROR(DivergentRays, NumericError);
VERGEKIT_DEFINE_ERROR(OutOfImage, NumericError);
VERGEKIT_DEFINE_ERROR(ModelMissing, NumericError);

// vergence_control
VERGEKIT_DEFINE_ERROR(NonMonotonicTimestamp, IoError);
VERGEKIT_DEFINE_ERROR(WrongMode, ConfigError);

// scene_capture
VERGEKIT_DEFINE_ERROR(InsufficientCorrespondences, NumericError);
VERGEKIT_DEFINE_ERROR(DegenerateConfiguration, NumericError);
VERGEKIT_DEFINE_ERROR(GimbalDegenerate, NumericError);
VERGEKIT_DEFINE_ERROR(DegenerateQuad, NumericError);

// session_eval
VERGEKIT_DEFINE_ERROR(OutOfRangeTruth, ConfigError);
VERGEKIT_DEFINE_ERROR(MisorderedLog, IoError);

#undef VERGEKIT_DEFINE_ERROR

} // namespace vergekit
