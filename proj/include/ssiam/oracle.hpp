#pragma once

#include <memory>
#include <string>

#include "ssiam/authorization.hpp"
#include "ssiam/view.hpp"

namespace ssiam {

// Oracle-side consumer of the bridge HTTP API. Views are pinned: one
// /health call fixes head_seq, and every accessor queries at that height.
class OracleClient {
public:
    OracleClient(std::string host, int port) : host_(std::move(host)), port_(port) {}

    // Throws Errc::view_unavailable when the API cannot be reached.
    std::shared_ptr<IdentityView> make_view() const;

    AuthorizationRuntime::ViewProvider provider() const {
        return [*this] { return make_view(); };
    }

private:
    std::string host_;
    int port_;
};

}  // namespace ssiam
