#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chainprocure {

// Every failure the engine can report. The API maps each variant onto exactly
// one machine code and HTTP status (see error_code_name / http_status).
enum class ErrorCode {
  BadRequest,
  MalformedKey,
  BadSeed,
  InvalidSignature,
  DuplicateTransaction,
  // multisig
  BadThreshold,
  DuplicateCosignatory,
  CycleDetected,
  DepthExceeded,
  UnknownCosignatory,
  NotMultisig,
  NotACosignatory,
  AlreadySigned,
  NotOpen,
  NotApproved,
  UnknownAccount,
  UnknownPending,
  // procurement
  KycRequired,
  DuplicateAddress,
  NotAuthorized,
  AlreadyDecided,
  UnknownUser,
  BadWindow,
  WindowClosed,
  WindowNotOpen,
  SelfBid,
  DuplicateBid,
  UnknownRequest,
  WindowStillOpen,
  NoBids,
  NotClosed,
  NotAParty,
  UnknownContract,
  // service
  NotFound,
  Busy,
  CorruptLog,
  BindFailure,
  Io,
};

std::string_view error_code_name(ErrorCode code);
int http_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chainprocure
