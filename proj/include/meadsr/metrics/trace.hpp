#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "meadsr/core/types.hpp"

namespace meadsr {

// Line-oriented run trace.
//
//   # <header key=value ...>
//   <time_ns> <event> key=value ...
//
// Events: gen, enq, tx, rx, drop, deliver (packet life cycle), charge (one per
// energy draw, exact picojoules) and select (MEA-DSR selection audit). The
// format is meant to be re-parsed by independent tools.
class TraceWriter {
public:
  class Line {
  public:
    explicit Line(std::string* out) : out_{out} {}
    Line(const Line&) = delete;
    Line& operator=(const Line&) = delete;
    ~Line()
    {
      if (out_) out_->push_back('\n');
    }

    Line& kv(std::string_view key, std::int64_t v)
    {
      if (!out_) return *this;
      key_(key);
      append_int(v);
      return *this;
    }
    Line& kv(std::string_view key, std::uint64_t v) { return kv(key, static_cast<std::int64_t>(v)); }
    Line& kv(std::string_view key, std::uint32_t v) { return kv(key, static_cast<std::int64_t>(v)); }
    Line& kv(std::string_view key, int v) { return kv(key, static_cast<std::int64_t>(v)); }
    Line& kv(std::string_view key, std::string_view v)
    {
      if (!out_) return *this;
      key_(key);
      out_->append(v);
      return *this;
    }
    Line& kv(std::string_view key, const char* v) { return kv(key, std::string_view{v}); }
    Line& kv(std::string_view key, double v)
    {
      if (!out_) return *this;
      key_(key);
      char buf[32];
      auto res = std::to_chars(buf, buf + sizeof buf, v);
      out_->append(buf, res.ptr);
      return *this;
    }
    Line& node(std::string_view key, NodeId n)
    {
      if (!out_) return *this;
      if (n == kBroadcast) return kv(key, "*");
      return kv(key, static_cast<std::int64_t>(n));
    }
    Line& pair(std::string_view key, std::int64_t a, std::int64_t b)
    {
      if (!out_) return *this;
      key_(key);
      append_int(a);
      out_->push_back(':');
      append_int(b);
      return *this;
    }
    Line& route(std::string_view key, std::span<const NodeId> r)
    {
      if (!out_) return *this;
      key_(key);
      if (r.empty()) out_->push_back('-');
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out_->push_back(',');
        append_int(r[i]);
      }
      return *this;
    }

  private:
    friend class TraceWriter;
    void key_(std::string_view key)
    {
      out_->push_back(' ');
      out_->append(key);
      out_->push_back('=');
    }
    void append_int(std::int64_t v)
    {
      char buf[24];
      auto res = std::to_chars(buf, buf + sizeof buf, v);
      out_->append(buf, res.ptr);
    }
    std::string* out_;
  };

  TraceWriter() = default;                                   // disabled
  explicit TraceWriter(std::ostream* sink) : enabled_{true}, sink_{sink} {}  // null sink keeps lines in memory

  bool enabled() const { return enabled_; }

  Line event(SimTime t, std::string_view ev)
  {
    if (!enabled_) return Line{nullptr};
    maybe_flush();
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof buf, t.count());
    buffer_.append(buf, res.ptr);
    buffer_.push_back(' ');
    buffer_.append(ev);
    return Line{&buffer_};
  }

  Line header()
  {
    if (!enabled_) return Line{nullptr};
    buffer_.push_back('#');
    return Line{&buffer_};
  }

  void flush()
  {
    if (sink_ && !buffer_.empty()) {
      sink_->write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
      buffer_.clear();
    }
  }

  // In-memory contents (everything when there is no sink).
  const std::string& text() const { return buffer_; }
  std::string take() { return std::exchange(buffer_, {}); }

private:
  void maybe_flush()
  {
    if (sink_ && buffer_.size() > (1u << 20)) flush();
  }

  bool enabled_{false};
  std::ostream* sink_{nullptr};
  std::string buffer_;
};

}  // namespace meadsr
