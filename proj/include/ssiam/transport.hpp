#pragma once

#include <deque>
#include <optional>
#include <set>

#include "ssiam/bytes.hpp"

namespace ssiam {

// Abstract in-process stand-in for the proximity link (NFC/Bluetooth/WiFi).
enum class Side { A, B };

class Transport {
public:
    virtual ~Transport() = default;
    virtual void send(Side from, Bytes message) = 0;
    virtual std::optional<Bytes> recv(Side to) = 0;
};

// Message-indexed fault plan over the link's global send counter.
struct FaultPlan {
    std::set<size_t> drop;
    std::set<size_t> duplicate;
    std::set<size_t> corrupt;     // flip one byte
    std::set<size_t> delay_once;  // deliver after the next message on the same direction.
};

class InProcLink final : public Transport {
public:
    InProcLink() = default;
    explicit InProcLink(FaultPlan faults) : faults_(std::move(faults)) {}

    void send(Side from, Bytes message) override;
    std::optional<Bytes> recv(Side to) override;

    size_t sent_count() const { return sent_; }

private:
    std::deque<Bytes>& queue_for(Side to) { return to == Side::A ? to_a_ : to_b_; }
    void deliver_with_faults(std::deque<Bytes>& queue, size_t index, Bytes message);

    std::deque<Bytes> to_a_, to_b_;
    std::optional<std::pair<Side, Bytes>> delayed_;
    FaultPlan faults_;
    size_t sent_ = 0;
};

}  // namespace ssiam
