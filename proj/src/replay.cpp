#include "ssiam/replay.hpp"

#include "ssiam/errors.hpp"
#include "ssiam/view.hpp"

namespace ssiam {

ReplayOutcome replay_decisions(const IdentityLedgerCore& identity, const AuthLedger& auth) {
    std::map<std::string, VerifierContract> contracts;
    size_t checked = 0;
    for (uint64_t seq = 1; seq <= auth.height(); ++seq) {
        AuthTxn txn;
        try {
            txn = auth.read(seq);
        } catch (const Error& e) {
            return {false, seq, e.what(), 0};
        }

        if (txn.kind != AuthKind::INVOKE) {
            apply_auth_txn(contracts, txn);
            continue;
        }

        auto it = contracts.find(txn.contract_address);
        if (it == contracts.end())
            return {false, seq, "invocation of a contract never deployed", 0};
        const VerifierContract& contract = it->second;
        bool authorized = contract.allowed_invokers.count(txn.caller_did) > 0;

        if (!txn.decision) {
            if (authorized)
                return {false, seq, "authorized invocation logged without a decision", 0};
            continue;  // failed invocation, correctly decision-free
        }
        if (!authorized)
            return {false, seq, "decision recorded for an unauthorized caller", 0};

        Presentation presentation;
        InvokeContext context;
        try {
            presentation = Presentation::from_json(txn.payload.at("presentation"));
            context = InvokeContext::from_json(txn.payload.at("context"));
        } catch (const std::exception& e) {
            return {false, seq, std::string("invocation payload unreadable: ") + e.what(), 0};
        }

        if (digest_of(presentation.to_json()).hex() !=
            txn.payload.at("presentation_digest").get<std::string>())
            return {false, seq, "presentation digest mismatch", 0};

        Decision recomputed;
        if (context.stale()) {
            recomputed = decide(contract, presentation, context, nullptr);
        } else if (context.view_head > identity.height()) {
            return {false, seq, "checked height beyond the identity ledger", 0};
        } else {
            DirectIdentityView view(identity, context.view_head);
            recomputed = decide(contract, presentation, context, &view);
        }

        if (canonical_string(recomputed.to_json()) != canonical_string(txn.decision->to_json()))
            return {false, seq,
                    "stored decision " + canonical_string(txn.decision->to_json()) +
                        " != replayed " + canonical_string(recomputed.to_json()),
                    checked};
        ++checked;
    }
    return {true, 0, "", checked};
}

}  // namespace ssiam
