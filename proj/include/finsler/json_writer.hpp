#pragma once

#include <string>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/extended_real.hpp"
#include "finsler/util.hpp"

namespace finsler {

// Streaming JSON writer with insertion-ordered keys and %.12e doubles, so
// identical runs produce byte-identical reports.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    prefix();
    out_ += '{';
    stack_.push_back(State::object_first);
    return *this;
  }
  JsonWriter& end_object() {
    out_ += '}';
    stack_.pop_back();
    return *this;
  }
  JsonWriter& begin_array() {
    prefix();
    out_ += '[';
    stack_.push_back(State::array_first);
    return *this;
  }
  JsonWriter& end_array() {
    out_ += ']';
    stack_.pop_back();
    return *this;
  }

  JsonWriter& key(const std::string& k) {
    prefix();
    append_string(k);
    out_ += ':';
    pending_value_ = true;
    return *this;
  }

  JsonWriter& value(double v) {
    prefix();
    out_ += fmt_e(v);
    return *this;
  }
  JsonWriter& value(long long v) {
    prefix();
    out_ += std::to_string(v);
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(std::size_t v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(bool v) {
    prefix();
    out_ += v ? "true" : "false";
    return *this;
  }
  JsonWriter& value(const std::string& v) {
    prefix();
    append_string(v);
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  // "+inf"/"-inf" literals as JSON strings; finite values as numbers.
  JsonWriter& value(const ExtendedReal& v) {
    if (v.is_finite()) return value(v.value());
    return value(v.str());
  }

  JsonWriter& point(const std::vector<double>& p) {
    begin_array();
    for (double v : p) value(v);
    return end_array();
  }

  std::string str() const {
    if (!stack_.empty()) throw InternalError("JsonWriter: unbalanced document");
    return out_ + "\n";
  }

 private:
  enum class State { object_first, object_rest, array_first, array_rest };

  void prefix() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (stack_.empty()) return;
    State& s = stack_.back();
    if (s == State::object_rest || s == State::array_rest) out_ += ',';
    if (s == State::object_first) s = State::object_rest;
    if (s == State::array_first) s = State::array_rest;
  }

  void append_string(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"':
          out_ += "\\\"";
          break;
        case '\\':
          out_ += "\\\\";
          break;
        case '\n':
          out_ += "\\n";
          break;
        case '\t':
          out_ += "\\t";
          break;
        case '\r':
          out_ += "\\r";
          break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<State> stack_;
  bool pending_value_ = false;
};

}  // namespace finsler
