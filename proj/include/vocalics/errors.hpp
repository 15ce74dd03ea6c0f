#pragma once

#include <stdexcept>
#include <string>

namespace vocalics {

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define VOCALICS_DEFINE_ERROR(Name)                             \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& msg) : Error(msg) {}       \
  }

// audio
VOCALICS_DEFINE_ERROR(MalformedFile);
VOCALICS_DEFINE_ERROR(UnsupportedEncoding);
VOCALICS_DEFINE_ERROR(EmptyClip);
VOCALICS_DEFINE_ERROR(NoVoicedContent);

// lld
VOCALICS_DEFINE_ERROR(ClipTooShort);
VOCALICS_DEFINE_ERROR(GridMismatch);

// functionals
VOCALICS_DEFINE_ERROR(TooFewFrames);
VOCALICS_DEFINE_ERROR(UnknownDescriptor);

// classifier
VOCALICS_DEFINE_ERROR(SingleClass);
VOCALICS_DEFINE_ERROR(DimensionMismatch);
VOCALICS_DEFINE_ERROR(EmptyMatrix);

// evaluation
VOCALICS_DEFINE_ERROR(TooFewSpeakers);
VOCALICS_DEFINE_ERROR(MisalignedManifest);
VOCALICS_DEFINE_ERROR(NonPositiveDays);

// corpus / manifest
VOCALICS_DEFINE_ERROR(DuplicateId);
VOCALICS_DEFINE_ERROR(MissingColumn);
VOCALICS_DEFINE_ERROR(BadLevel);
VOCALICS_DEFINE_ERROR(BadSentenceId);
VOCALICS_DEFINE_ERROR(IoFailure);

// cli: model trained on one feature set used against another
VOCALICS_DEFINE_ERROR(ContractMismatch);

#undef VOCALICS_DEFINE_ERROR

}  // namespace vocalics
