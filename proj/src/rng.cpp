#include "gvecf/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gvecf {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("Rng::uniform_index: n must be positive");
    }
    return static_cast<std::size_t>(engine_() % n);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::string Rng::serialize() const {
    std::ostringstream out;
    out << engine_ << ' ' << (has_spare_ ? 1 : 0) << ' ' << std::hexfloat << spare_;
    return out.str();
}

void Rng::deserialize(const std::string& text) {
    std::istringstream in(text);
    int spare_flag = 0;
    std::string spare_hex;
    if (!(in >> engine_ >> spare_flag >> spare_hex)) {
        throw std::runtime_error("Rng::deserialize: malformed state string");
    }
    has_spare_ = spare_flag != 0;
    spare_ = std::strtod(spare_hex.c_str(), nullptr);
}

}  // namespace gvecf
