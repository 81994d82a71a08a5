#include "ssiam/authorization.hpp"

#include "ssiam/errors.hpp"

namespace ssiam {

std::string to_string(AuthKind kind) {
    switch (kind) {
        case AuthKind::DEPLOY: return "DEPLOY";
        case AuthKind::UPDATE_POLICY: return "UPDATE_POLICY";
        case AuthKind::INVOKE: return "INVOKE";
    }
    fail(Errc::parse_error, "bad auth kind");
}

AuthKind auth_kind_from_string(const std::string& s) {
    if (s == "DEPLOY") return AuthKind::DEPLOY;
    if (s == "UPDATE_POLICY") return AuthKind::UPDATE_POLICY;
    if (s == "INVOKE") return AuthKind::INVOKE;
    fail(Errc::parse_error, "unknown auth kind: " + s);
}

Json Decision::to_json() const {
    std::vector<std::string> names;
    names.reserve(reasons.size());
    for (ReasonCode r : reasons) names.push_back(to_string(r));
    return Json{{"outcome", outcome},
                {"reasons", names},
                {"checked_at_seq", checked_at_seq},
                {"decided_at", decided_at}};
}

Decision Decision::from_json(const Json& j) {
    Decision d;
    d.outcome = j.at("outcome").get<std::string>();
    if (d.outcome != "GRANT" && d.outcome != "DENY")
        fail(Errc::parse_error, "decision outcome must be GRANT or DENY");
    for (const auto& r : j.at("reasons")) d.reasons.push_back(reason_from_string(r));
    d.checked_at_seq = j.at("checked_at_seq").get<uint64_t>();
    d.decided_at = j.at("decided_at").get<uint64_t>();
    return d;
}

Json AuthTxn::hash_view() const {
    Json j{{"seq_no", seq_no},
           {"kind", to_string(kind)},
           {"contract_address", contract_address},
           {"caller_did", caller_did},
           {"payload", payload},
           {"prev_hash", prev_hash.hex()}};
    if (decision) j["decision"] = decision->to_json();
    return j;
}

Json AuthTxn::to_json() const {
    Json j = hash_view();
    j["txn_hash"] = txn_hash.hex();
    return j;
}

AuthTxn AuthTxn::from_json(const Json& j) {
    AuthTxn t;
    t.seq_no = j.at("seq_no").get<uint64_t>();
    t.kind = auth_kind_from_string(j.at("kind").get<std::string>());
    t.contract_address = j.at("contract_address").get<std::string>();
    t.caller_did = j.at("caller_did").get<std::string>();
    t.payload = j.at("payload");
    if (j.contains("decision")) t.decision = Decision::from_json(j.at("decision"));
    t.prev_hash = Digest::from_hex(j.at("prev_hash").get<std::string>());
    t.txn_hash = Digest::from_hex(j.at("txn_hash").get<std::string>());
    return t;
}

AuthLedger::AuthLedger(std::filesystem::path log_file) : log_file_(std::move(log_file)) {
    if (std::filesystem::exists(log_file_)) replay_file();
    out_.open(log_file_, std::ios::app);
    if (!out_) fail(Errc::io_error, "cannot open access log " + log_file_.string());
}

void AuthLedger::replay_file() {
    std::ifstream in(log_file_);
    if (!in) fail(Errc::io_error, "cannot read access log " + log_file_.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Entry e;
        e.raw = line;
        try {
            e.txn = AuthTxn::from_json(canonical_parse(line));
        } catch (const std::exception&) {
            e.parse_ok = false;
        }
        entries_.push_back(std::move(e));
    }
}

Receipt AuthLedger::append(AuthKind kind, const std::string& contract_address,
                           const std::string& caller_did, Json payload,
                           std::optional<Decision> decision) {
    Entry e;
    e.txn.seq_no = entries_.size() + 1;
    e.txn.kind = kind;
    e.txn.contract_address = contract_address;
    e.txn.caller_did = caller_did;
    e.txn.payload = std::move(payload);
    e.txn.decision = std::move(decision);
    e.txn.prev_hash = entries_.empty() ? Digest::zero() : entries_.back().txn.txn_hash;
    e.txn.txn_hash = digest_of(e.txn.hash_view());
    e.raw = canonical_string(e.txn.to_json());
    out_ << e.raw << "\n";
    out_.flush();
    if (!out_) fail(Errc::io_error, "access log write failed");
    entries_.push_back(std::move(e));
    return Receipt{entries_.back().txn.seq_no, entries_.back().txn.txn_hash};
}

AuthTxn AuthLedger::read(uint64_t seq_no) const {
    if (seq_no < 1 || seq_no > entries_.size()) fail(Errc::out_of_range, "seq_no out of range");
    const Entry& e = entries_[seq_no - 1];
    if (!e.parse_ok) fail(Errc::ledger_corrupt, "entry " + std::to_string(seq_no) + " unreadable");
    return e.txn;
}

const std::string& AuthLedger::read_raw(uint64_t seq_no) const {
    if (seq_no < 1 || seq_no > entries_.size()) fail(Errc::out_of_range, "seq_no out of range");
    return entries_[seq_no - 1].raw;
}

ChainCheck AuthLedger::verify_chain_detailed() const {
    Digest prev = Digest::zero();
    for (uint64_t i = 0; i < entries_.size(); ++i) {
        uint64_t seq = i + 1;
        const Entry& e = entries_[i];
        if (!e.parse_ok) return {false, seq, "entry does not parse"};
        if (e.txn.seq_no != seq) return {false, seq, "seq_no mismatch"};
        if (canonical_string(e.txn.to_json()) != e.raw)
            return {false, seq, "stored bytes are not the canonical entry"};
        if (e.txn.prev_hash != prev) return {false, seq, "broken prev_hash link"};
        if (digest_of(e.txn.hash_view()) != e.txn.txn_hash)
            return {false, seq, "txn_hash does not recompute"};
        prev = e.txn.txn_hash;
    }
    return {};
}

bool InvokeContext::stale() const {
    if (!view_available || !ledger_height) return true;
    uint64_t height = *ledger_height;
    uint64_t lag = height > view_head ? height - view_head : 0;
    return lag > freshness_bound;
}

Json InvokeContext::to_json() const {
    Json j{{"vehicle_did", vehicle_did},
           {"location", location},
           {"time", time},
           {"view_available", view_available},
           {"view_head", view_head},
           {"freshness_bound", freshness_bound}};
    if (ledger_height) j["ledger_height"] = *ledger_height;
    return j;
}

InvokeContext InvokeContext::from_json(const Json& j) {
    InvokeContext c;
    c.vehicle_did = j.at("vehicle_did").get<std::string>();
    c.location = j.at("location").get<std::string>();
    c.time = j.at("time").get<uint64_t>();
    c.view_available = j.at("view_available").get<bool>();
    c.view_head = j.at("view_head").get<uint64_t>();
    if (j.contains("ledger_height")) c.ledger_height = j.at("ledger_height").get<uint64_t>();
    c.freshness_bound = j.at("freshness_bound").get<uint64_t>();
    return c;
}

Decision decide(const VerifierContract& contract, const Presentation& presentation,
                const InvokeContext& context, const IdentityView* view) {
    Decision d;
    d.decided_at = context.time;
    d.checked_at_seq = context.view_head;

    if (context.stale() || view == nullptr) {
        d.outcome = "DENY";
        d.reasons = {ReasonCode::STALE_LEDGER_VIEW};
        return d;
    }

    VerificationReport report = verify_presentation(presentation, *view, context.time);
    std::vector<ReasonCode> reasons = report.failure_reasons;
    std::vector<ReasonCode> policy_reasons = evaluate_policy(
        contract.policy, presentation.disclosed,
        PolicyContext{context.vehicle_did, context.location, context.time},
        presentation.metadata.valid_from, presentation.metadata.valid_until);
    reasons.insert(reasons.end(), policy_reasons.begin(), policy_reasons.end());
    reasons = normalize_reasons(std::move(reasons));

    if (reasons.empty()) {
        d.outcome = "GRANT";
        d.reasons = {ReasonCode::OK};
    } else {
        d.outcome = "DENY";
        d.reasons = std::move(reasons);
    }
    return d;
}

void apply_auth_txn(std::map<std::string, VerifierContract>& contracts, const AuthTxn& txn) {
    switch (txn.kind) {
        case AuthKind::DEPLOY: {
            VerifierContract c;
            c.address = txn.contract_address;
            c.owner_did = txn.payload.at("owner_did").get<std::string>();
            c.policy = AccessPolicy::from_json(txn.payload.at("policy"));
            c.allowed_invokers.insert(c.owner_did);
            for (const auto& v : txn.payload.at("vehicle_dids"))
                c.allowed_invokers.insert(v.get<std::string>());
            c.active = true;
            contracts[c.address] = std::move(c);
            break;
        }
        case AuthKind::UPDATE_POLICY: {
            auto it = contracts.find(txn.contract_address);
            if (it == contracts.end())
                fail(Errc::unknown_contract, "policy update for unknown contract");
            it->second.policy = AccessPolicy::from_json(txn.payload.at("policy"));
            break;
        }
        case AuthKind::INVOKE:
            break;  // invocations do not change contract state
    }
}

AuthorizationRuntime::AuthorizationRuntime(AuthLedger& log, ViewProvider provider,
                                           uint64_t freshness_bound)
    : log_(log), provider_(std::move(provider)), freshness_bound_(freshness_bound) {
    for (uint64_t seq = 1; seq <= log_.height(); ++seq)
        apply_auth_txn(contracts_, log_.read(seq));
}

std::string AuthorizationRuntime::deploy(const std::string& owner_did, const AccessPolicy& policy,
                                         const std::vector<std::string>& vehicle_dids) {
    auto view = provider_();
    if (!view->resolve_did(owner_did))
        fail(Errc::unknown_submitter, "contract owner not registered: " + owner_did);

    uint64_t deploy_seq = log_.height() + 1;
    std::string address =
        digest_of(Json{{"owner_did", owner_did}, {"deploy_seq", deploy_seq}}).hex();
    Json payload{{"owner_did", owner_did},
                 {"policy", policy.to_json()},
                 {"vehicle_dids", vehicle_dids}};
    log_.append(AuthKind::DEPLOY, address, owner_did, payload, std::nullopt);
    apply_auth_txn(contracts_, log_.read(deploy_seq));
    return address;
}

Receipt AuthorizationRuntime::update_policy(const std::string& address,
                                            const AccessPolicy& policy,
                                            const Signature& owner_signature) {
    auto it = contracts_.find(address);
    if (it == contracts_.end()) fail(Errc::unknown_contract, "no contract at " + address);

    auto view = provider_();
    auto owner_doc = view->resolve_did(it->second.owner_did);
    if (!owner_doc) fail(Errc::resolution_failed, "cannot resolve contract owner");
    Bytes msg = canonicalize(policy.to_json());
    bool owner_signed = false;
    for (const auto& key : owner_doc->authentication_keys())
        if (verify(key, msg, owner_signature)) owner_signed = true;
    if (!owner_signed) fail(Errc::unauthorized, "policy update not signed by the owner");

    Json payload{{"policy", policy.to_json()}, {"owner_sig", owner_signature.hex()}};
    Receipt receipt = log_.append(AuthKind::UPDATE_POLICY, address, it->second.owner_did,
                                  payload, std::nullopt);
    apply_auth_txn(contracts_, log_.read(receipt.seq_no));
    return receipt;
}

AuthorizationRuntime::Invocation AuthorizationRuntime::invoke(const std::string& address,
                                                              const std::string& caller_did,
                                                              const Presentation& presentation,
                                                              const std::string& location,
                                                              const std::string& vehicle_did,
                                                              uint64_t now) {
    auto it = contracts_.find(address);
    if (it == contracts_.end()) fail(Errc::unknown_contract, "no contract at " + address);
    const VerifierContract& contract = it->second;
    std::string presentation_digest = digest_of(presentation.to_json()).hex();

    if (!contract.allowed_invokers.count(caller_did)) {
        // Failed invocation: audited, never a Decision.
        Json payload{{"presentation_digest", presentation_digest},
                     {"context", Json{{"vehicle_did", vehicle_did},
                                      {"location", location},
                                      {"time", now}}},
                     {"rejected", "unauthorized_caller"}};
        log_.append(AuthKind::INVOKE, address, caller_did, payload, std::nullopt);
        fail(Errc::unauthorized, "caller is not an allowed invoker: " + caller_did);
    }

    InvokeContext context;
    context.vehicle_did = vehicle_did;
    context.location = location;
    context.time = now;
    context.freshness_bound = freshness_bound_;
    std::shared_ptr<IdentityView> view;
    try {
        view = provider_();
        context.view_available = true;
        context.view_head = view->head_seq();
        context.ledger_height = view->ledger_height();
    } catch (const Error& e) {
        if (e.code() != Errc::view_unavailable) throw;
        context.view_available = false;
    }

    Decision decision = decide(contract, presentation, context, view.get());
    Json payload{{"presentation", presentation.to_json()},
                 {"presentation_digest", presentation_digest},
                 {"context", context.to_json()}};
    Receipt receipt = log_.append(AuthKind::INVOKE, address, caller_did, payload, decision);
    return Invocation{decision, receipt};
}

Decision AuthorizationRuntime::read_decision(const Receipt& receipt) const {
    AuthTxn txn = log_.read(receipt.seq_no);
    if (txn.kind != AuthKind::INVOKE || !txn.decision)
        fail(Errc::not_found, "no decision at seq " + std::to_string(receipt.seq_no));
    return *txn.decision;
}

std::vector<AuthTxn> AuthorizationRuntime::audit_log(
    const std::optional<std::string>& address) const {
    std::vector<AuthTxn> out;
    for (uint64_t seq = 1; seq <= log_.height(); ++seq) {
        AuthTxn txn = log_.read(seq);
        if (!address || txn.contract_address == *address) out.push_back(std::move(txn));
    }
    return out;
}

const VerifierContract& AuthorizationRuntime::contract(const std::string& address) const {
    auto it = contracts_.find(address);
    if (it == contracts_.end()) fail(Errc::unknown_contract, "no contract at " + address);
    return it->second;
}

}  // namespace ssiam
