#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include "finsler/errors.hpp"

namespace finsler {

// Real number extended with +inf / -inf tags. Infinite values carry no
// payload; value() throws unless the tag is finite.
class ExtendedReal {
 public:
  enum class Tag { finite, pos_inf, neg_inf };

  ExtendedReal() : tag_(Tag::finite), value_(0.0) {}

  static ExtendedReal finite(double v) {
    if (!std::isfinite(v)) throw InvalidInput("ExtendedReal: non-finite value");
    ExtendedReal r;
    r.tag_ = Tag::finite;
    r.value_ = v;
    return r;
  }
  static ExtendedReal pos_inf() {
    ExtendedReal r;
    r.tag_ = Tag::pos_inf;
    return r;
  }
  static ExtendedReal neg_inf() {
    ExtendedReal r;
    r.tag_ = Tag::neg_inf;
    return r;
  }

  Tag tag() const { return tag_; }
  bool is_finite() const { return tag_ == Tag::finite; }
  bool is_pos_inf() const { return tag_ == Tag::pos_inf; }
  bool is_neg_inf() const { return tag_ == Tag::neg_inf; }

  double value() const {
    if (tag_ != Tag::finite) throw InvalidInput("ExtendedReal: value() on infinite");
    return value_;
  }

  // Total order: -inf < finite < +inf.
  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.tag_ == b.tag_) {
      return a.tag_ == Tag::finite && a.value_ < b.value_;
    }
    if (a.tag_ == Tag::neg_inf) return true;
    if (b.tag_ == Tag::neg_inf) return false;
    return b.tag_ == Tag::pos_inf;
  }
  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.tag_ != b.tag_) return false;
    return a.tag_ != Tag::finite || a.value_ == b.value_;
  }
  friend bool operator!=(const ExtendedReal& a, const ExtendedReal& b) { return !(a == b); }
  friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) { return a < b || a == b; }
  friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
  friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) { return b <= a; }

  static ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? b : a; }

  // "+inf"/"-inf" literals, matching the CSV/JSON interchange convention.
  std::string str() const {
    if (tag_ == Tag::pos_inf) return "+inf";
    if (tag_ == Tag::neg_inf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", value_);
    return buf;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) { return os << x.str(); }

 private:
  Tag tag_;
  double value_;
};

}  // namespace finsler
