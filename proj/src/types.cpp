#include "esindy/types.hpp"

namespace esindy {

void DataMatrix::validate() const {
    if (values.rows() < 2) throw InputError("data matrix needs at least 2 time samples");
    if (dt <= 0.0) throw InputError("data matrix dt must be positive");
    if (!all_finite(values)) throw InputError("data matrix contains non-finite entries");
}

void Field::validate() const {
    if (values.rows() < 2 || values.cols() < 2) throw InputError("field grid needs at least 2x2 points");
    if (dt <= 0.0 || dx <= 0.0) throw InputError("field dt and dx must be positive");
    if (!all_finite(values)) throw InputError("field contains non-finite entries");
}

}  // namespace esindy
