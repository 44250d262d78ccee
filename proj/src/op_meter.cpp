#include "utpm/op_meter.hpp"

namespace utpm {

std::ostream& operator<<(std::ostream& os, const OpCounters& c) {
    return os << "{matrix_mul=" << c.matrix_mul << ", matrix_add=" << c.matrix_add
              << ", base_inverse=" << c.base_inverse << ", scalar_mul=" << c.scalar_mul
              << ", scalar_add=" << c.scalar_add << ", scalar_div=" << c.scalar_div
              << ", scalar_sqrt=" << c.scalar_sqrt << "}";
}

}  // namespace utpm
