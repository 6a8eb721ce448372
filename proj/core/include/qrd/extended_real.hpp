#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace qrd {

// A real number or +inf. Arithmetic on the infinite branch is explicit; value()
// on +inf throws instead of leaking a float infinity into sums.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    constexpr ExtendedReal(double v) : value_(v) {}  // NOLINT: implicit on purpose

    static constexpr ExtendedReal infinity() {
        ExtendedReal r;
        r.infinite_ = true;
        return r;
    }

    constexpr bool is_finite() const { return !infinite_; }
    constexpr bool is_infinite() const { return infinite_; }

    double value() const {
        if (infinite_) throw std::logic_error("ExtendedReal: value() on +inf");
        return value_;
    }

    // Float view for reporting and comparisons only.
    double as_double() const {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_) return false;
        if (b.infinite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
    friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) { return !(b < a); }
    friend bool operator>=(const ExtendedReal& a, const ExtendedReal& b) { return !(a < b); }
    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }

    friend ExtendedReal operator+(const ExtendedReal& a, const ExtendedReal& b) {
        if (a.infinite_ || b.infinite_) return infinity();
        return a.value_ + b.value_;
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
        if (x.infinite_) return os << "inf";
        return os << x.value_;
    }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

inline ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? b : a; }
inline ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) { return a < b ? a : b; }

} // namespace qrd
