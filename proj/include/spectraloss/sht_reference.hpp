#ifndef SPECTRALOSS_SHT_REFERENCE_HPP
#define SPECTRALOSS_SHT_REFERENCE_HPP

#include "spectraloss/sht.hpp"

namespace spectraloss {
namespace reference {

/// Serial direct-summation transforms: quadratic-cost zonal DFT plus
/// pointwise Legendre evaluation, no FFT and no threading.  Kept as the
/// independent check for the production kernels and as the benchmark
/// baseline.
SpectralField analyze_direct(const GridField& field, Truncation trunc);
GridField synthesize_direct(const SpectralField& spec, const Grid& grid);

}  // namespace reference
}  // namespace spectraloss

#endif
