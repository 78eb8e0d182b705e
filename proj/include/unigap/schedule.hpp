#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "unigap/error.hpp"

namespace unigap {

/// Non-decreasing, divergent gap sequence (gamma_k)_{k >= 1}.
class GapSchedule {
 public:
  using Generator = std::function<double(std::size_t)>;

  GapSchedule(std::string name, Generator gamma)
      : name_(std::move(name)),
        gamma_(std::make_shared<const Generator>(std::move(gamma))) {}

  /// gamma_k, 1-based.
  double operator()(std::size_t k) const {
    if (k == 0) throw DomainError("gap schedules are 1-based");
    return (*gamma_)(k);
  }

  const std::string& name() const { return name_; }

  /// gamma_k = slope * k.
  static GapSchedule linear(double slope) {
    return GapSchedule(format_name("linear", slope),
                       [slope](std::size_t k) { return slope * static_cast<double>(k); });
  }

  /// gamma_k = 2^{2k+1}, the gap of the interval counterexample.
  static GapSchedule counterexample() {
    return GapSchedule("counterexample", [](std::size_t k) {
      return std::ldexp(1.0, static_cast<int>(2 * k + 1));
    });
  }

  static GapSchedule identity() {
    return GapSchedule("identity", [](std::size_t k) { return static_cast<double>(k); });
  }

  static GapSchedule square() {
    return GapSchedule("square", [](std::size_t k) {
      return static_cast<double>(k) * static_cast<double>(k);
    });
  }

  /// Same schedule with every gap multiplied by factor > 0.
  GapSchedule scaled(double factor) const {
    auto inner = gamma_;
    return GapSchedule(name_ + "*" + format_number(factor),
                       [inner, factor](std::size_t k) { return factor * (*inner)(k); });
  }

 private:
  static std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }
  static std::string format_name(std::string_view base, double v) {
    return std::string(base) + ":" + format_number(v);
  }

  std::string name_;
  std::shared_ptr<const Generator> gamma_;
};

/// Registry: "linear:<slope>", "linear" (slope 3), "counterexample",
/// "identity", "square".
inline GapSchedule schedule_from_name(std::string_view name) {
  if (name == "counterexample") return GapSchedule::counterexample();
  if (name == "identity") return GapSchedule::identity();
  if (name == "square") return GapSchedule::square();
  if (name == "linear") return GapSchedule::linear(3.0);
  if (name.starts_with("linear:")) {
    auto text = name.substr(7);
    double slope = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), slope);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(slope > 0.0)) {
      throw ConfigError("bad linear schedule slope: " + std::string(name));
    }
    return GapSchedule::linear(slope);
  }
  throw ConfigError("unknown schedule: " + std::string(name));
}

}  // namespace unigap
