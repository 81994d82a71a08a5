#pragma once

#include <string>

#include "ssiam/authorization.hpp"
#include "ssiam/identity_ledger.hpp"

namespace ssiam {

struct ReplayOutcome {
    bool ok = true;
    uint64_t mismatch_seq = 0;
    std::string detail;
    size_t decisions_checked = 0;
};

// Re-executes every logged invocation from the two transaction logs alone:
// contract state is rebuilt from DEPLOY/UPDATE_POLICY entries, the identity
// view is pinned at each decision's checked height, and the recomputed
// decision must match the stored one byte for byte.
ReplayOutcome replay_decisions(const IdentityLedgerCore& identity, const AuthLedger& auth);

}  // namespace ssiam
