#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "uascan/cert/certificate.hpp"
#include "uascan/client/budget.hpp"
#include "uascan/client/channel.hpp"
#include "uascan/client/result.hpp"
#include "uascan/errors.hpp"
#include "uascan/net/url.hpp"
#include "uascan/policy.hpp"
#include "uascan/wire/services.hpp"

namespace uascan::client {

struct ProbeOptions {
    ScanBudget budget;

    /// Self-signed instance certificate presented on secured OPNs. Generate
    /// once per campaign with make_client_certificate().
    Bytes client_certificate;
    std::string application_uri = "urn:uascan:scanner";
    std::string product_uri = "urn:uascan:scanner";
    std::string application_name = "uascan security scanner";
    /// Operator contact; embedded in the certificate and session name so a
    /// server operator can identify — and object to — the scan.
    std::string contact = "research@example.org";

    net::Millis io_timeout{5000};
    uint32_t browse_batch = 20;      // BrowseDescriptions per request
    uint32_t max_references = 1000;  // per-node cap; more arrives via BrowseNext
    uint32_t read_batch = 50;        // attributes per Read request
    size_t max_nodes = 100000;       // traversal cap; beyond it the snapshot is truncated
};

/// The scanner's own certificate: 2048-bit RSA / SHA-256, contact in the
/// subject, application URI as subject-alt-name.
inline Bytes make_client_certificate(const ProbeOptions& opts) {
    cert::SelfSignedSpec spec;
    spec.common_name = "uascan scanner";
    spec.organization = opts.contact;
    spec.application_uri = opts.application_uri;
    return cert::generate_self_signed(spec);
}

// ---------------------------------------------------------------------------
// Prober
//
// One probe runs at most two connections:
//   A: Hello → OPN(None) → GetEndpoints → session + traversal when a plain
//      endpoint exists → CLO
//   B: only when secured endpoints exist: Hello → OPN(weakest secured
//      policy, our certificate). Its verdict is the channel probe; when no
//      plain endpoint exists the session probe runs here as well.
//
// Every send is paced and counted by the shared BudgetTracker; when the
// byte or time budget trips mid-traversal the snapshot is marked truncated
// and the connection closes within one request.
// ---------------------------------------------------------------------------

class Prober {
public:
    Prober(net::Target target, ProbeOptions opts)
        : target_(std::move(target)), opts_(std::move(opts)), tracker_(opts_.budget) {}

    ProbeResult run() {
        ProbeResult out;
        out.target = target_;
        out.observed_at =
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
        const auto started = std::chrono::steady_clock::now();

        UaConnection conn(target_, tracker_, opts_.io_timeout);
        bool plain_channel = false;
        try {
            conn.hello();
            out.reached = true;
            conn.open_channel(policy_uri(PolicyId::None), wire::SecurityMode::None, {}, {});
            plain_channel = true;
            out.endpoints = probe_endpoints(conn);
        } catch (const Error& e) {
            out.error = e.what();
        }
        harvest_descriptions(out);

        const bool have_plain = std::any_of(out.endpoints.begin(), out.endpoints.end(),
                                            [](const auto& e) { return is_plain(e); });
        bool session_done = false;
        if (plain_channel && have_plain) {
            probe_anonymous_session(conn, out);
            session_done = true;
        }
        if (plain_channel) conn.close_channel();
        else conn.abort();
        absorb(conn, out);

        if (const auto* secured = pick_weakest_secured(out.endpoints)) {
            probe_secure_channel(*secured, !session_done, out);
            session_done = true;
        }

        out.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
        return out;
    }

    /// GetEndpoints over an established channel.
    std::vector<wire::EndpointDescription> probe_endpoints(UaConnection& conn) {
        wire::GetEndpointsRequest req;
        req.header = fresh_header();
        req.endpoint_url = wire::UaString(net::opc_url(target_));
        auto body = conn.call(wire::encode_message(req));
        if (auto* resp = std::get_if<wire::GetEndpointsResponse>(&body))
            return std::move(resp->endpoints);
        if (auto* fault = std::get_if<wire::ServiceFault>(&body))
            throw ServerError(fault->header.service_result, "GetEndpoints fault");
        throw CodecError(errc::malformed_response, "GetEndpoints reply has wrong type");
    }

    /// CreateSession + anonymous ActivateSession on `conn`; on success the
    /// address space is harvested on the same connection.
    void probe_anonymous_session(UaConnection& conn, ProbeResult& out) {
        const wire::EndpointDescription* ep = pick_session_endpoint(out.endpoints);
        try {
            wire::CreateSessionRequest create;
            create.header = fresh_header();
            create.client_description.application_uri = wire::UaString(opts_.application_uri);
            create.client_description.product_uri = wire::UaString(opts_.product_uri);
            create.client_description.application_name.text =
                wire::UaString(opts_.application_name + " (" + opts_.contact + ")");
            create.endpoint_url = wire::UaString(
                ep && !ep->endpoint_url.null ? ep->endpoint_url.str() : net::opc_url(target_));
            create.session_name = wire::UaString("uascan probe (" + opts_.contact + ")");
            create.client_nonce = wire::UaBytes(Bytes(32, 0));
            if (!opts_.client_certificate.empty())
                create.client_certificate = wire::UaBytes(opts_.client_certificate);
            create.requested_session_timeout_ms = 120000;
            create.max_response_message_size = 16u << 20;

            auto body = conn.call(wire::encode_message(create));
            if (auto* fault = std::get_if<wire::ServiceFault>(&body)) {
                out.session_probe = map_session_fault(fault->header.service_result);
                out.session_status = fault->header.service_result;
                return;
            }
            auto* created = std::get_if<wire::CreateSessionResponse>(&body);
            if (!created)
                throw CodecError(errc::malformed_response, "CreateSession reply has wrong type");
            const wire::NodeId auth = created->authentication_token;

            wire::ActivateSessionRequest activate;
            activate.header = fresh_header();
            activate.header.authentication_token = auth;
            wire::AnonymousIdentityToken token;
            const wire::UserTokenPolicy* policy =
                ep ? ep->token_policy(wire::UserTokenType::Anonymous) : nullptr;
            token.policy_id =
                policy && !policy->policy_id.null ? policy->policy_id : wire::UaString("anonymous");
            activate.user_identity_token = wire::make_identity_token(token);

            auto abody = conn.call(wire::encode_message(activate));
            if (auto* fault = std::get_if<wire::ServiceFault>(&abody)) {
                out.session_probe = map_session_fault(fault->header.service_result);
                out.session_status = fault->header.service_result;
                return;
            }
            if (!std::get_if<wire::ActivateSessionResponse>(&abody))
                throw CodecError(errc::malformed_response,
                                 "ActivateSession reply has wrong type");
            out.session_probe = SessionProbe::AnonymousAccepted;
            out.session_status = 0;

            traverse_address_space(conn, auth, out);
            close_session(conn, auth);
        } catch (const ServerError& e) {
            out.session_probe = map_session_fault(e.status());
            out.session_status = e.status();
        } catch (const Error& e) {
            if (out.session_probe == SessionProbe::NotAttempted)
                out.session_probe = SessionProbe::InvalidConfiguration;
            if (out.error.empty()) out.error = e.what();
        }
    }

    /// OPN with the weakest secured policy and our self-signed certificate.
    /// When no plain endpoint exists (`run_session`), the session probe rides
    /// on this channel — or is recorded as SecureChannelRejected.
    void probe_secure_channel(const wire::EndpointDescription& ep, bool run_session,
                              ProbeResult& out) {
        UaConnection conn(target_, tracker_, opts_.io_timeout);
        bool accepted = false;
        try {
            conn.hello();
            conn.open_channel(ep.security_policy_uri.str(), ep.security_mode,
                              opts_.client_certificate, server_thumbprint(ep, out));
            out.channel_probe = ChannelProbe::Accepted;
            out.channel_status = 0;
            accepted = true;
        } catch (const ServerError& e) {
            out.channel_status = e.status();
            out.channel_probe = certificate_rejection(e.status()) ? ChannelProbe::CertificateRejected
                                                                  : ChannelProbe::Error;
        } catch (const Error& e) {
            out.channel_probe = ChannelProbe::Error;
            if (out.error.empty()) out.error = e.what();
        }

        if (run_session) {
            if (accepted) {
                probe_anonymous_session(conn, out);
            } else {
                out.session_probe = SessionProbe::SecureChannelRejected;
                out.session_status = out.channel_status;
            }
        }
        if (accepted) conn.close_channel();
        else conn.abort();
        absorb(conn, out);
    }

    /// Breadth-first walk from the Root folder over hierarchical references,
    /// then AccessLevel/Executable reads for the variables and methods found.
    void traverse_address_space(UaConnection& conn, const wire::NodeId& auth, ProbeResult& out) {
        AddressSpaceSnapshot snap;
        try {
            read_server_metadata(conn, auth, snap, out);

            const wire::NodeId root = wire::NodeId::numeric(0, 84);
            // Root never appears as a browse target, so it is seeded; the
            // record is withdrawn if the server disowns it.
            snap.nodes.emplace(root, wire::NodeRecord{root, "Root", wire::NodeClass::Object,
                                                      std::nullopt, std::nullopt, 0});
            std::deque<wire::NodeId> queue{root};
            std::set<wire::NodeId> seen{root};

            while (!queue.empty()) {
                if (tracker_.exhausted() || snap.nodes.size() >= opts_.max_nodes) {
                    snap.truncated = true;
                    break;
                }
                std::vector<wire::NodeId> batch;
                while (!queue.empty() && batch.size() < opts_.browse_batch) {
                    batch.push_back(queue.front());
                    queue.pop_front();
                }

                wire::BrowseRequest req;
                req.header = fresh_header();
                req.header.authentication_token = auth;
                req.requested_max_references_per_node = opts_.max_references;
                for (const auto& id : batch) {
                    wire::BrowseDescription d;
                    d.node_id = id;
                    d.direction = wire::BrowseDirection::Forward;
                    d.reference_type_id = wire::NodeId::numeric(0, 33);  // HierarchicalReferences
                    d.include_subtypes = true;
                    d.result_mask = 0x3f;
                    req.nodes_to_browse.push_back(d);
                }

                auto body = conn.call(wire::encode_message(req));
                auto* resp = std::get_if<wire::BrowseResponse>(&body);
                if (!resp) {
                    snap.truncated = true;
                    break;
                }
                bool stop = false;
                for (size_t i = 0; i < resp->results.size() && i < batch.size(); ++i) {
                    auto& result = resp->results[i];
                    if (batch[i] == root && wire::status::is_bad(result.status))
                        snap.nodes.erase(root);
                    if (wire::status::is_bad(result.status)) continue;
                    if (!ingest_references(result.references, snap, queue, seen)) {
                        snap.truncated = true;
                        stop = true;
                        break;
                    }
                    if (!drain_continuation(conn, auth, result.continuation_point, snap, queue,
                                            seen)) {
                        snap.truncated = true;
                        stop = true;
                        break;
                    }
                }
                if (stop) break;
            }

            read_attributes(conn, auth, snap);
        } catch (const Error& e) {
            snap.truncated = true;
            if (out.error.empty()) out.error = e.what();
        }
        out.address_space = std::move(snap);
    }

private:
    static bool is_plain(const wire::EndpointDescription& e) {
        return policy_from_uri(e.security_policy_uri.str()) == PolicyId::None;
    }

    static bool certificate_rejection(uint32_t code) {
        return code == wire::status::Bad_SecurityChecksFailed ||
               code == wire::status::Bad_CertificateUntrusted;
    }

    static SessionProbe map_session_fault(uint32_t code) {
        switch (code) {
        case wire::status::Bad_IdentityTokenRejected:
        case wire::status::Bad_IdentityTokenInvalid:
        case wire::status::Bad_UserAccessDenied: return SessionProbe::AuthenticationRejected;
        default: return SessionProbe::InvalidConfiguration;
        }
    }

    /// Lowest-security endpoint offering anonymous access; with none on
    /// offer, the lowest-security endpoint overall (the rejection is the
    /// observation).
    static const wire::EndpointDescription* pick_session_endpoint(
        const std::vector<wire::EndpointDescription>& endpoints) {
        auto weaker = [](const wire::EndpointDescription& a, const wire::EndpointDescription& b) {
            auto rank = [](const wire::EndpointDescription& e) {
                return std::pair(wire::mode_rank(e.security_mode),
                                 policy_strength(policy_from_uri(e.security_policy_uri.str())));
            };
            return rank(a) < rank(b);
        };
        const wire::EndpointDescription* best = nullptr;
        for (const auto& e : endpoints)
            if (e.offers_token(wire::UserTokenType::Anonymous) && (!best || weaker(e, *best)))
                best = &e;
        if (best) return best;
        for (const auto& e : endpoints)
            if (!best || weaker(e, *best)) best = &e;
        return best;
    }

    static const wire::EndpointDescription* pick_weakest_secured(
        const std::vector<wire::EndpointDescription>& endpoints) {
        const wire::EndpointDescription* best = nullptr;
        for (const auto& e : endpoints) {
            if (is_plain(e)) continue;
            if (!best ||
                std::pair(policy_strength(policy_from_uri(e.security_policy_uri.str())),
                          wire::mode_rank(e.security_mode)) <
                    std::pair(policy_strength(policy_from_uri(best->security_policy_uri.str())),
                              wire::mode_rank(best->security_mode)))
                best = &e;
        }
        return best;
    }

    Bytes server_thumbprint(const wire::EndpointDescription& ep, const ProbeResult& out) const {
        if (!ep.server_certificate.null && !ep.server_certificate.value.empty())
            return cert::sha1_thumbprint(ep.server_certificate.value);
        if (out.server_certificate && !out.server_certificate->empty())
            return cert::sha1_thumbprint(*out.server_certificate);
        return {};
    }

    void harvest_descriptions(ProbeResult& out) const {
        for (const auto& e : out.endpoints) {
            if (!out.application_uri && !e.server.application_uri.null)
                out.application_uri = e.server.application_uri.str();
            if (!out.product_uri && !e.server.product_uri.null)
                out.product_uri = e.server.product_uri.str();
            if (!out.server_certificate && !e.server_certificate.null &&
                !e.server_certificate.value.empty())
                out.server_certificate = e.server_certificate.value;
        }
    }

    void read_server_metadata(UaConnection& conn, const wire::NodeId& auth,
                              AddressSpaceSnapshot& snap, ProbeResult& out) {
        wire::ReadRequest req;
        req.header = fresh_header();
        req.header.authentication_token = auth;
        wire::ReadValueId namespaces;
        namespaces.node_id = wire::NodeId::numeric(0, 2255);  // Server_NamespaceArray
        wire::ReadValueId version;
        version.node_id = wire::NodeId::numeric(0, 2264);  // BuildInfo_SoftwareVersion
        req.nodes_to_read = {namespaces, version};

        auto body = conn.call(wire::encode_message(req));
        auto* resp = std::get_if<wire::ReadResponse>(&body);
        if (!resp || resp->results.size() != 2) return;
        if (resp->results[0].status_or_good() == wire::status::Good && resp->results[0].value)
            if (auto arr = resp->results[0].value->as_string_array())
                snap.namespace_array = std::move(*arr);
        if (resp->results[1].status_or_good() == wire::status::Good && resp->results[1].value)
            if (auto ver = resp->results[1].value->as_string()) out.software_version = *ver;
    }

    /// Folds one batch of references into the snapshot. Returns false when
    /// the node cap is hit.
    bool ingest_references(const std::vector<wire::ReferenceDescription>& refs,
                           AddressSpaceSnapshot& snap, std::deque<wire::NodeId>& queue,
                           std::set<wire::NodeId>& seen) {
        for (const auto& ref : refs) {
            if ((ref.node_id.server_index && *ref.node_id.server_index != 0) ||
                !ref.node_id.namespace_uri.null)
                continue;  // lives on another server
            const wire::NodeId& id = ref.node_id.node;
            wire::NodeRecord rec;
            rec.node_id = id;
            rec.browse_name = ref.browse_name.name.str();
            rec.node_class = wire::node_class_from_wire(ref.node_class);
            rec.namespace_index = id.namespace_index;
            snap.nodes.emplace(id, std::move(rec));
            if (seen.insert(id).second) queue.push_back(id);
            if (snap.nodes.size() >= opts_.max_nodes) return false;
        }
        return true;
    }

    bool drain_continuation(UaConnection& conn, const wire::NodeId& auth, wire::UaBytes point,
                            AddressSpaceSnapshot& snap, std::deque<wire::NodeId>& queue,
                            std::set<wire::NodeId>& seen) {
        while (!point.null) {
            if (tracker_.exhausted()) return false;
            wire::BrowseNextRequest req;
            req.header = fresh_header();
            req.header.authentication_token = auth;
            req.continuation_points.push_back(point);
            auto body = conn.call(wire::encode_message(req));
            auto* resp = std::get_if<wire::BrowseNextResponse>(&body);
            if (!resp || resp->results.empty()) return false;
            if (wire::status::is_bad(resp->results[0].status)) return true;  // point expired
            if (!ingest_references(resp->results[0].references, snap, queue, seen)) return false;
            point = resp->results[0].continuation_point;
        }
        return true;
    }

    void read_attributes(UaConnection& conn, const wire::NodeId& auth,
                         AddressSpaceSnapshot& snap) {
        std::vector<wire::NodeId> variables;
        std::vector<wire::NodeId> methods;
        for (const auto& [id, rec] : snap.nodes) {
            if (rec.node_class == wire::NodeClass::Variable) variables.push_back(id);
            if (rec.node_class == wire::NodeClass::Method) methods.push_back(id);
        }
        read_attribute_batches(conn, auth, variables, wire::attribute_id::AccessLevel, snap);
        read_attribute_batches(conn, auth, methods, wire::attribute_id::Executable, snap);
    }

    void read_attribute_batches(UaConnection& conn, const wire::NodeId& auth,
                                const std::vector<wire::NodeId>& ids, uint32_t attribute,
                                AddressSpaceSnapshot& snap) {
        for (size_t offset = 0; offset < ids.size(); offset += opts_.read_batch) {
            if (tracker_.exhausted()) {
                snap.truncated = true;
                return;
            }
            wire::ReadRequest req;
            req.header = fresh_header();
            req.header.authentication_token = auth;
            const size_t end = std::min(ids.size(), offset + opts_.read_batch);
            for (size_t i = offset; i < end; ++i) {
                wire::ReadValueId rv;
                rv.node_id = ids[i];
                rv.attribute_id = attribute;
                req.nodes_to_read.push_back(rv);
            }
            auto body = conn.call(wire::encode_message(req));
            auto* resp = std::get_if<wire::ReadResponse>(&body);
            if (!resp) {
                snap.truncated = true;
                return;
            }
            for (size_t i = 0; i < resp->results.size() && offset + i < end; ++i) {
                const auto& dv = resp->results[i];
                if (dv.status_or_good() != wire::status::Good || !dv.value) continue;
                auto it = snap.nodes.find(ids[offset + i]);
                if (it == snap.nodes.end()) continue;
                if (attribute == wire::attribute_id::AccessLevel) {
                    if (auto b = dv.value->as_byte()) it->second.access_level = *b;
                } else if (auto e = dv.value->as_bool()) {
                    it->second.executable = *e;
                }
            }
        }
    }

    void close_session(UaConnection& conn, const wire::NodeId& auth) {
        try {
            wire::CloseSessionRequest req;
            req.header = fresh_header();
            req.header.authentication_token = auth;
            req.delete_subscriptions = false;
            conn.call(wire::encode_message(req));
        } catch (const Error&) {
            // the channel close will end the session anyway
        }
    }

    wire::RequestHeader fresh_header() {
        wire::RequestHeader h;
        h.timestamp = UaConnection::now_filetime();
        h.request_handle = next_handle_++;
        h.timeout_hint = static_cast<uint32_t>(opts_.io_timeout.count());
        return h;
    }

    static void absorb(const UaConnection& conn, ProbeResult& out) {
        out.bytes_sent += conn.bytes_sent();
        out.bytes_received += conn.bytes_received();
    }

    net::Target target_;
    ProbeOptions opts_;
    BudgetTracker tracker_;
    uint32_t next_handle_ = 1;
};

/// One-call form: probe a single host within its own budget.
inline ProbeResult probe_host(const net::Target& target, const ProbeOptions& opts) {
    return Prober(target, opts).run();
}

}  // namespace uascan::client
