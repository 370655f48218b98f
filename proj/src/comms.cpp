#include "sarsim/comms.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace sarsim {

namespace {

void put_u32(std::uint8_t* p, std::uint32_t v) {
    p[0] = static_cast<std::uint8_t>(v & 0xFF);
    p[1] = static_cast<std::uint8_t>((v >> 8) & 0xFF);
    p[2] = static_cast<std::uint8_t>((v >> 16) & 0xFF);
    p[3] = static_cast<std::uint8_t>((v >> 24) & 0xFF);
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

constexpr std::int32_t kLatLimit = 900000000;   // 90 deg * 1e7
constexpr std::int32_t kLonLimit = 1800000000;  // 180 deg * 1e7

}  // namespace

std::uint16_t crc16_x25(const std::uint8_t* data, std::size_t len) {
    std::uint16_t crc = 0xFFFF;
    for (std::size_t i = 0; i < len; ++i) {
        crc ^= data[i];
        for (int bit = 0; bit < 8; ++bit) {
            crc = (crc & 1) ? static_cast<std::uint16_t>((crc >> 1) ^ 0x8408)
                            : static_cast<std::uint16_t>(crc >> 1);
        }
    }
    return static_cast<std::uint16_t>(crc ^ 0xFFFF);
}

std::array<std::uint8_t, kPayloadSize> encode_payload(const CoordMessage& msg) {
    std::array<std::uint8_t, kPayloadSize> out{};
    out[0] = msg.uav_id;
    put_u32(&out[1], static_cast<std::uint32_t>(msg.lat_1e7));
    put_u32(&out[5], static_cast<std::uint32_t>(msg.lon_1e7));
    out[9] = msg.state_code;
    put_u32(&out[10], msg.timestamp_ms);
    return out;
}

CoordMessage decode_payload(const std::uint8_t* payload) {
    CoordMessage msg;
    msg.uav_id = payload[0];
    msg.lat_1e7 = static_cast<std::int32_t>(get_u32(&payload[1]));
    msg.lon_1e7 = static_cast<std::int32_t>(get_u32(&payload[5]));
    msg.state_code = payload[9];
    msg.timestamp_ms = get_u32(&payload[10]);
    return msg;
}

std::array<std::uint8_t, kFrameSize> encode_frame(const CoordMessage& msg, std::uint8_t seq,
                                                  std::uint8_t message_id) {
    if (msg.lat_1e7 < -kLatLimit || msg.lat_1e7 > kLatLimit) {
        throw std::invalid_argument("encode: latitude out of range");
    }
    if (msg.lon_1e7 < -kLonLimit || msg.lon_1e7 > kLonLimit) {
        throw std::invalid_argument("encode: longitude out of range");
    }
    if (!mission_state_from_code(msg.state_code)) {
        throw std::invalid_argument("encode: unknown mission state code");
    }

    std::array<std::uint8_t, kFrameSize> frame{};
    frame[0] = kFrameMagic;
    frame[1] = static_cast<std::uint8_t>(kPayloadSize);
    frame[2] = seq;
    frame[3] = msg.uav_id;
    frame[4] = kComponentId;
    frame[5] = message_id;
    const auto payload = encode_payload(msg);
    std::memcpy(&frame[6], payload.data(), kPayloadSize);
    const std::uint16_t crc = crc16_x25(&frame[1], kFrameSize - 3);
    frame[20] = static_cast<std::uint8_t>(crc & 0xFF);
    frame[21] = static_cast<std::uint8_t>(crc >> 8);
    return frame;
}

const char* to_string(DecodeError e) {
    switch (e) {
        case DecodeError::None: return "none";
        case DecodeError::Truncated: return "truncated";
        case DecodeError::BadMagic: return "bad_magic";
        case DecodeError::BadLength: return "bad_length";
        case DecodeError::BadChecksum: return "bad_checksum";
        case DecodeError::BadMessageId: return "bad_message_id";
        case DecodeError::BadState: return "bad_state";
    }
    return "?";
}

DecodeResult decode_frame(const std::uint8_t* data, std::size_t len,
                          std::uint8_t expected_message_id) {
    DecodeResult r;
    if (len < kFrameSize) {
        r.error = DecodeError::Truncated;
        return r;
    }
    if (data[0] != kFrameMagic) {
        r.error = DecodeError::BadMagic;
        return r;
    }
    const std::uint16_t expected = crc16_x25(&data[1], kFrameSize - 3);
    const std::uint16_t got =
        static_cast<std::uint16_t>(data[20]) | (static_cast<std::uint16_t>(data[21]) << 8);
    if (expected != got) {
        r.error = DecodeError::BadChecksum;
        return r;
    }
    if (data[1] != kPayloadSize) {
        r.error = DecodeError::BadLength;
        return r;
    }
    if (data[5] != expected_message_id) {
        r.error = DecodeError::BadMessageId;
        return r;
    }
    CoordMessage msg = decode_payload(&data[6]);
    if (!mission_state_from_code(msg.state_code)) {
        r.error = DecodeError::BadState;
        return r;
    }
    r.sequence = data[2];
    r.message = msg;
    return r;
}

CoordMessage make_status_message(std::uint8_t uav_id, const GeoPoint& position,
                                 MissionState state, std::uint32_t timestamp_ms) {
    CoordMessage msg;
    msg.uav_id = uav_id;
    msg.lat_1e7 = static_cast<std::int32_t>(std::llround(position.lat_deg * 1e7));
    msg.lon_1e7 = static_cast<std::int32_t>(std::llround(position.lon_deg * 1e7));
    msg.state_code = static_cast<std::uint8_t>(state);
    msg.timestamp_ms = timestamp_ms;
    return msg;
}

void PeerTable::update(const CoordMessage& msg, double now) {
    std::lock_guard<std::mutex> lock(mutex_);
    records_[msg.uav_id] = PeerRecord{msg, now};
}

std::optional<PeerRecord> PeerTable::get(std::uint8_t uav_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = records_.find(uav_id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

bool PeerTable::stale(std::uint8_t uav_id, double now) const {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = records_.find(uav_id);
    if (it == records_.end()) return true;
    return now - it->second.last_rx_time > staleness_timeout_s_;
}

std::vector<PeerRecord> PeerTable::fresh_peers(double now) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<PeerRecord> out;
    for (const auto& [id, rec] : records_) {
        if (now - rec.last_rx_time <= staleness_timeout_s_) out.push_back(rec);
    }
    return out;
}

Arbitration arbitrate(const ArbitrationInputs& in) {
    for (const PeerRecord& peer : in.fresh_peers) {
        if (peer.last.uav_id == in.own_id) continue;
        const auto state = mission_state_from_code(peer.last.state_code);
        if (!state) continue;
        if (*state == MissionState::Drop) return Arbitration::Denied;
        if (*state == MissionState::WaitingToDrop) {
            const bool earlier = peer.last.timestamp_ms < in.own_request_ms ||
                                 (peer.last.timestamp_ms == in.own_request_ms &&
                                  peer.last.uav_id < in.own_id);
            if (earlier) return Arbitration::Denied;
        }
        if (in.inflated_drop_zone) {
            const GeoPoint geo{peer.last.lat_1e7 / 1e7, peer.last.lon_1e7 / 1e7};
            const EnuPosition enu = geo_to_enu(geo, in.origin);
            if (point_in_polygon(enu.xy(), *in.inflated_drop_zone)) {
                return Arbitration::Denied;
            }
        }
    }
    return Arbitration::Granted;
}

SimNetwork::SimNetwork(const NetworkConfig& cfg, Rng* rng, int agent_count)
    : cfg_(cfg), rng_(rng), agent_count_(agent_count) {
    if (cfg.loss_prob < 0.0 || cfg.loss_prob > 1.0) {
        throw std::invalid_argument("network: loss probability must be in [0,1]");
    }
    if (cfg.latency_s < 0.0 || cfg.jitter_s < 0.0) {
        throw std::invalid_argument("network: latency and jitter must be >= 0");
    }
}

void SimNetwork::broadcast(int sender, const std::uint8_t* frame, std::size_t len, double now) {
    for (int receiver = 0; receiver < agent_count_; ++receiver) {
        if (receiver == sender) continue;
        ++sent_;
        if (cfg_.loss_prob > 0.0 && rng_->bernoulli(cfg_.loss_prob)) {
            ++dropped_;
            continue;
        }
        double delay = cfg_.latency_s;
        if (cfg_.jitter_s > 0.0) delay += rng_->uniform(0.0, cfg_.jitter_s);
        queue_.push(Pending{now + delay, next_order_++, receiver,
                            std::vector<std::uint8_t>(frame, frame + len)});
    }
}

std::vector<std::vector<std::uint8_t>> SimNetwork::poll(int receiver, double now) {
    std::vector<std::vector<std::uint8_t>> out;
    std::vector<Pending> keep;
    while (!queue_.empty() && queue_.top().due <= now + 1e-12) {
        Pending p = queue_.top();
        queue_.pop();
        if (p.receiver == receiver) {
            out.push_back(std::move(p.frame));
        } else {
            keep.push_back(std::move(p));
        }
    }
    for (Pending& p : keep) queue_.push(std::move(p));
    return out;
}

UdpTransport::UdpTransport(const std::string& bind_host, std::uint16_t bind_port) {
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) throw std::runtime_error("udp: socket() failed");

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(bind_port);
    if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw std::runtime_error("udp: bad bind address " + bind_host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        throw std::runtime_error("udp: bind failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
        bound_port_ = ntohs(bound.sin_port);
    }
    const int flags = ::fcntl(fd_, F_GETFL, 0);
    ::fcntl(fd_, F_SETFL, flags | O_NONBLOCK);
}

UdpTransport::~UdpTransport() {
    if (fd_ >= 0) ::close(fd_);
}

void UdpTransport::add_peer(const std::string& host, std::uint16_t port) {
    peers_.emplace_back(host, port);
}

void UdpTransport::broadcast(const std::uint8_t* data, std::size_t len) {
    for (const auto& [host, port] : peers_) {
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) continue;
        ::sendto(fd_, data, len, 0, reinterpret_cast<sockaddr*>(&addr), sizeof(addr));
    }
}

std::vector<std::vector<std::uint8_t>> UdpTransport::poll() {
    std::vector<std::vector<std::uint8_t>> out;
    std::uint8_t buf[512];
    for (;;) {
        const ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
        if (n <= 0) break;
        out.emplace_back(buf, buf + n);
    }
    return out;
}

}  // namespace sarsim
