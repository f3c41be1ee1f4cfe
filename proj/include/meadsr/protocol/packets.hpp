#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "meadsr/core/types.hpp"

namespace meadsr {

enum class Protocol : std::uint8_t { dsr, mea_dsr };

inline const char* to_string(Protocol p) { return p == Protocol::dsr ? "dsr" : "mea-dsr"; }

inline std::optional<Protocol> parse_protocol(const std::string& s)
{
  if (s == "dsr") return Protocol::dsr;
  if (s == "mea-dsr") return Protocol::mea_dsr;
  return std::nullopt;
}

struct Rreq {
  NodeId src{0};
  NodeId dst{0};
  std::uint32_t seq{0};
  std::vector<NodeId> route_record;    // intermediates only, in traversal order
  std::optional<Energy> min_bat_lev;   // carried by MEA-DSR only

  // Hops travelled by a copy when it is heard by the next node.
  std::uint32_t hop_count() const { return static_cast<std::uint32_t>(route_record.size()) + 1; }
};

enum class ReplyRole : std::uint8_t { primary, alternate };

inline const char* to_string(ReplyRole r) { return r == ReplyRole::primary ? "primary" : "alternate"; }

struct Rrep {
  NodeId src{0};  // discovery originator
  NodeId dst{0};  // discovery target
  std::uint32_t seq{0};
  Route route;  // src ... dst
  ReplyRole role{ReplyRole::primary};
  Route path;   // hops the reply travels, replier first, src last
  std::size_t cursor{0};
};

struct Rerr {
  NodeId reporter{0};
  NodeId broken_from{0};
  NodeId broken_to{0};
  NodeId session_src{0};
  Route path;  // reporter first, session_src last
  std::size_t cursor{0};
};

struct DataPacket {
  NodeId src{0};
  NodeId dst{0};
  std::uint32_t flow_seq{0};
  Route source_route;
  std::size_t cursor{0};
  std::uint32_t payload_size{512};
  SimTime generated_at{0};
  std::uint32_t salvage_count{0};
};

enum class PacketKind : std::uint8_t { rreq, rrep, rerr, data };

inline const char* to_string(PacketKind k)
{
  switch (k) {
    case PacketKind::rreq: return "RREQ";
    case PacketKind::rrep: return "RREP";
    case PacketKind::rerr: return "RERR";
    case PacketKind::data: return "DATA";
  }
  return "?";
}

struct Packet {
  std::uint64_t uid{0};
  std::variant<Rreq, Rrep, Rerr, DataPacket> body;

  PacketKind kind() const { return static_cast<PacketKind>(body.index()); }
  bool is_control() const { return kind() != PacketKind::data; }

  template <class T> T& as() { return std::get<T>(body); }
  template <class T> const T& as() const { return std::get<T>(body); }
};

// Nominal header sizes used for airtime and energy accounting.
struct PacketSizes {
  std::uint32_t rreq_base{16};
  std::uint32_t rrep_base{16};
  std::uint32_t rerr{20};
  std::uint32_t data_base{24};
  std::uint32_t per_address{4};
  std::uint32_t min_bat_lev_field{8};

  std::uint32_t size_of(const Packet& p) const
  {
    return std::visit(
        [this](const auto& b) -> std::uint32_t {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, Rreq>) {
            return rreq_base + per_address * static_cast<std::uint32_t>(b.route_record.size()) +
                   (b.min_bat_lev ? min_bat_lev_field : 0);
          } else if constexpr (std::is_same_v<T, Rrep>) {
            return rrep_base + per_address * static_cast<std::uint32_t>(b.route.size());
          } else if constexpr (std::is_same_v<T, Rerr>) {
            return rerr;
          } else {
            return data_base + per_address * static_cast<std::uint32_t>(b.source_route.size()) + b.payload_size;
          }
        },
        p.body);
  }
};

}  // namespace meadsr
