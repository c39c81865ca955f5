#include "chainprocure/error.hpp"

namespace chainprocure {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadRequest: return "BAD_REQUEST";
    case ErrorCode::MalformedKey: return "MALFORMED_KEY";
    case ErrorCode::BadSeed: return "BAD_SEED";
    case ErrorCode::InvalidSignature: return "INVALID_SIGNATURE";
    case ErrorCode::DuplicateTransaction: return "DUPLICATE_TRANSACTION";
    case ErrorCode::BadThreshold: return "BAD_THRESHOLD";
    case ErrorCode::DuplicateCosignatory: return "DUPLICATE_COSIGNATORY";
    case ErrorCode::CycleDetected: return "CYCLE_DETECTED";
    case ErrorCode::DepthExceeded: return "DEPTH_EXCEEDED";
    case ErrorCode::UnknownCosignatory: return "UNKNOWN_COSIGNATORY";
    case ErrorCode::NotMultisig: return "NOT_MULTISIG";
    case ErrorCode::NotACosignatory: return "NOT_A_COSIGNATORY";
    case ErrorCode::AlreadySigned: return "ALREADY_SIGNED";
    case ErrorCode::NotOpen: return "NOT_OPEN";
    case ErrorCode::NotApproved: return "NOT_APPROVED";
    case ErrorCode::UnknownAccount: return "UNKNOWN_ACCOUNT";
    case ErrorCode::UnknownPending: return "UNKNOWN_PENDING";
    case ErrorCode::KycRequired: return "KYC_REQUIRED";
    case ErrorCode::DuplicateAddress: return "DUPLICATE_ADDRESS";
    case ErrorCode::NotAuthorized: return "NOT_AUTHORIZED";
    case ErrorCode::AlreadyDecided: return "ALREADY_DECIDED";
    case ErrorCode::UnknownUser: return "UNKNOWN_USER";
    case ErrorCode::BadWindow: return "BAD_WINDOW";
    case ErrorCode::WindowClosed: return "WINDOW_CLOSED";
    case ErrorCode::WindowNotOpen: return "WINDOW_NOT_OPEN";
    case ErrorCode::SelfBid: return "SELF_BID";
    case ErrorCode::DuplicateBid: return "DUPLICATE_BID";
    case ErrorCode::UnknownRequest: return "UNKNOWN_REQUEST";
    case ErrorCode::WindowStillOpen: return "WINDOW_STILL_OPEN";
    case ErrorCode::NoBids: return "NO_BIDS";
    case ErrorCode::NotClosed: return "NOT_CLOSED";
    case ErrorCode::NotAParty: return "NOT_A_PARTY";
    case ErrorCode::UnknownContract: return "UNKNOWN_CONTRACT";
    case ErrorCode::NotFound: return "NOT_FOUND";
    case ErrorCode::Busy: return "BUSY";
    case ErrorCode::CorruptLog: return "CORRUPT_LOG";
    case ErrorCode::BindFailure: return "BIND_FAILURE";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "INTERNAL";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadRequest:
    case ErrorCode::MalformedKey:
    case ErrorCode::BadSeed:
    case ErrorCode::InvalidSignature:
      return 400;
    case ErrorCode::KycRequired:
    case ErrorCode::NotAuthorized:
    case ErrorCode::NotACosignatory:
    case ErrorCode::NotAParty:
      return 403;
    case ErrorCode::UnknownAccount:
    case ErrorCode::UnknownPending:
    case ErrorCode::UnknownUser:
    case ErrorCode::UnknownRequest:
    case ErrorCode::UnknownContract:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::DuplicateTransaction:
    case ErrorCode::AlreadySigned:
    case ErrorCode::NotOpen:
    case ErrorCode::NotApproved:
    case ErrorCode::DuplicateAddress:
    case ErrorCode::AlreadyDecided:
    case ErrorCode::WindowClosed:
    case ErrorCode::WindowNotOpen:
    case ErrorCode::SelfBid:
    case ErrorCode::DuplicateBid:
    case ErrorCode::WindowStillOpen:
    case ErrorCode::NoBids:
    case ErrorCode::NotClosed:
      return 409;
    case ErrorCode::BadThreshold:
    case ErrorCode::DuplicateCosignatory:
    case ErrorCode::CycleDetected:
    case ErrorCode::DepthExceeded:
    case ErrorCode::UnknownCosignatory:
    case ErrorCode::NotMultisig:
    case ErrorCode::BadWindow:
      return 422;
    case ErrorCode::Busy:
      return 503;
    case ErrorCode::CorruptLog:
    case ErrorCode::BindFailure:
    case ErrorCode::Io:
      return 500;
  }
  return 500;
}

}  // namespace chainprocure
