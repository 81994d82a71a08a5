#include "ssiam/transport.hpp"

namespace ssiam {

void InProcLink::send(Side from, Bytes message) {
    size_t index = sent_++;
    Side to = from == Side::A ? Side::B : Side::A;
    auto& queue = queue_for(to);

    if (delayed_ && delayed_->first == to) {
        // A previously delayed message surfaces behind this one.
        if (faults_.drop.count(index) == 0) deliver_with_faults(queue, index, std::move(message));
        queue.push_back(std::move(delayed_->second));
        delayed_.reset();
        return;
    }

    if (faults_.drop.count(index)) return;
    if (faults_.delay_once.count(index)) {
        delayed_ = {to, std::move(message)};
        return;
    }
    deliver_with_faults(queue, index, std::move(message));
}

void InProcLink::deliver_with_faults(std::deque<Bytes>& queue, size_t index, Bytes message) {
    if (faults_.corrupt.count(index) && !message.empty()) message.front() ^= 0x01;
    bool duplicate = faults_.duplicate.count(index) > 0;
    if (duplicate) queue.push_back(message);
    queue.push_back(std::move(message));
}

std::optional<Bytes> InProcLink::recv(Side to) {
    auto& queue = queue_for(to);
    if (queue.empty()) {
        if (delayed_ && delayed_->first == to) {
            Bytes out = std::move(delayed_->second);
            delayed_.reset();
            return out;
        }
        return std::nullopt;
    }
    Bytes out = std::move(queue.front());
    queue.pop_front();
    return out;
}

}  // namespace ssiam
