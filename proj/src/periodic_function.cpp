#include "dtn/periodic_function.hpp"

namespace dtn {

template class PeriodicFunction<double>;

} // namespace dtn
