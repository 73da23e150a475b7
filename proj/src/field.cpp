#include "usdmplc/field.hpp"

#include <cmath>

#include "usdmplc/errors.hpp"

namespace usdmplc {

double Field::power() const {
    double acc = 0.0;
    for (const Complex& a : amplitude) acc += std::norm(a);
    return acc * grid.cell_area();
}

Complex inner_product(const Field& f, const Field& g) {
    if (!(f.grid == g.grid)) {
        throw InvalidArgument("inner_product: fields live on different grids");
    }
    Complex acc{0.0, 0.0};
    const size_t n = f.amplitude.size();
    for (size_t i = 0; i < n; ++i) acc += std::conj(f.amplitude[i]) * g.amplitude[i];
    return acc * f.grid.cell_area();
}

double field_norm(const Field& f) { return std::sqrt(f.power()); }

Field normalized(const Field& f) {
    const double n = field_norm(f);
    if (!(n > 0.0)) throw InvalidArgument("normalized: field has zero power");
    Field out = f;
    const double s = 1.0 / n;
    for (Complex& a : out.amplitude) a *= s;
    return out;
}

}  // namespace usdmplc
