#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "sarsim/geometry.hpp"
#include "sarsim/mission.hpp"
#include "sarsim/rng.hpp"

namespace sarsim {

// Status datagram exchanged between UAVs: who I am, where I am, what I am
// doing and since when. The timestamp is the sender's state entry time in
// milliseconds since mission start; it provides the first-come-first-serve
// ordering for drop-zone requests.
struct CoordMessage {
    std::uint8_t uav_id = 0;
    std::int32_t lat_1e7 = 0;   // degrees * 1e7
    std::int32_t lon_1e7 = 0;   // degrees * 1e7
    std::uint8_t state_code = 0;
    std::uint32_t timestamp_ms = 0;

    bool operator==(const CoordMessage&) const = default;
};

inline constexpr std::size_t kPayloadSize = 14;
inline constexpr std::size_t kFrameSize = 22;
inline constexpr std::uint8_t kFrameMagic = 0xFE;
inline constexpr std::uint8_t kComponentId = 1;
inline constexpr std::uint8_t kDefaultMessageId = 222;

// CRC-16/X.25: reflected 0x1021, init 0xFFFF, final xor 0xFFFF.
// crc16_x25("123456789") == 0x906E.
std::uint16_t crc16_x25(const std::uint8_t* data, std::size_t len);

std::array<std::uint8_t, kPayloadSize> encode_payload(const CoordMessage& msg);
CoordMessage decode_payload(const std::uint8_t* payload);

// Full frame: magic, payload length, sequence, system id (= uav id),
// component id, message id, 14-byte payload, CRC-16/X.25 over everything
// between magic and CRC, little-endian. Throws std::invalid_argument when a
// field is out of range (|lat| > 90 deg, |lon| > 180 deg, bad state code).
std::array<std::uint8_t, kFrameSize> encode_frame(const CoordMessage& msg, std::uint8_t seq,
                                                  std::uint8_t message_id = kDefaultMessageId);

enum class DecodeError : std::uint8_t {
    None,
    Truncated,
    BadMagic,
    BadLength,
    BadChecksum,
    BadMessageId,
    BadState,
};

const char* to_string(DecodeError e);

struct DecodeResult {
    std::optional<CoordMessage> message;
    DecodeError error = DecodeError::None;
    std::uint8_t sequence = 0;
};

DecodeResult decode_frame(const std::uint8_t* data, std::size_t len,
                          std::uint8_t expected_message_id = kDefaultMessageId);

CoordMessage make_status_message(std::uint8_t uav_id, const GeoPoint& position,
                                 MissionState state, std::uint32_t timestamp_ms);

// Latest message per peer with receive bookkeeping. Safe for one writer and
// concurrent readers; the simulator uses it single-threaded.
struct PeerRecord {
    CoordMessage last;
    double last_rx_time = 0.0;
};

class PeerTable {
public:
    explicit PeerTable(double staleness_timeout_s = 2.0)
        : staleness_timeout_s_(staleness_timeout_s) {}

    void update(const CoordMessage& msg, double now);
    std::optional<PeerRecord> get(std::uint8_t uav_id) const;
    bool stale(std::uint8_t uav_id, double now) const;
    std::vector<PeerRecord> fresh_peers(double now) const;
    double staleness_timeout() const { return staleness_timeout_s_; }

private:
    double staleness_timeout_s_;
    mutable std::mutex mutex_;
    std::map<std::uint8_t, PeerRecord> records_;
};

enum class Arbitration : std::uint8_t { Granted, Denied };

struct ArbitrationInputs {
    std::uint8_t own_id = 0;
    std::uint32_t own_request_ms = 0;  // own WaitingToDrop entry time
    std::vector<PeerRecord> fresh_peers;
    const Polygon* inflated_drop_zone = nullptr;
    GeoPoint origin;
};

// First come, first serve. Denied while any fresh peer is dropping, claimed
// the slot earlier (timestamp, then lower id wins ties), or reports a
// position inside the inflated drop zone. Stale peers are assumed clear.
Arbitration arbitrate(const ArbitrationInputs& in);

// Deterministic in-process network: per-message Bernoulli loss and uniform
// latency jitter, delivery ordered by (due time, send order).
struct NetworkConfig {
    double loss_prob = 0.0;
    double latency_s = 0.0;
    double jitter_s = 0.0;
};

class SimNetwork {
public:
    SimNetwork(const NetworkConfig& cfg, Rng* rng, int agent_count);

    void broadcast(int sender, const std::uint8_t* frame, std::size_t len, double now);
    std::vector<std::vector<std::uint8_t>> poll(int receiver, double now);

    std::uint64_t sent_count() const { return sent_; }
    std::uint64_t dropped_count() const { return dropped_; }

private:
    struct Pending {
        double due = 0.0;
        std::uint64_t order = 0;
        int receiver = 0;
        std::vector<std::uint8_t> frame;
        bool operator>(const Pending& o) const {
            if (due != o.due) return due > o.due;
            return order > o.order;
        }
    };

    NetworkConfig cfg_;
    Rng* rng_;
    int agent_count_;
    std::uint64_t next_order_ = 0;
    std::uint64_t sent_ = 0;
    std::uint64_t dropped_ = 0;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
};

// Fixed-period send scheduler.
class CommsScheduler {
public:
    explicit CommsScheduler(double period_s) : period_s_(period_s) {}

    bool due(double now) {
        if (!next_) {
            next_ = now + period_s_;
            return true;
        }
        if (now + 1e-12 < *next_) return false;
        *next_ += period_s_;
        return true;
    }

private:
    double period_s_;
    std::optional<double> next_;
};

// Loopback-capable UDP datagram transport. The simulator never uses this;
// it exists for running agents as separate processes.
class UdpTransport {
public:
    UdpTransport(const std::string& bind_host, std::uint16_t bind_port);
    ~UdpTransport();
    UdpTransport(const UdpTransport&) = delete;
    UdpTransport& operator=(const UdpTransport&) = delete;

    void add_peer(const std::string& host, std::uint16_t port);
    void broadcast(const std::uint8_t* data, std::size_t len);
    std::vector<std::vector<std::uint8_t>> poll();
    std::uint16_t bound_port() const { return bound_port_; }

private:
    int fd_ = -1;
    std::uint16_t bound_port_ = 0;
    std::vector<std::pair<std::string, std::uint16_t>> peers_;
};

}  // namespace sarsim
