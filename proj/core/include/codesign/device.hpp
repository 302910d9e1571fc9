// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "codesign/resource.hpp"

namespace codesign {

struct DeviceSpec {
    std::string name;
    ResourceVector budget;
    double clock_mhz = 100.0;
    double bw_bytes_per_cycle = 16.0;
};
void validate(const DeviceSpec& d); // all positive

// PYNQ-Z1: 220 DSPs, 53,200 LUTs, 106,400 FFs, 4.9 Mbit BRAM.
DeviceSpec pynq_z1();

inline double cycles_to_ms(double cycles, double clock_mhz) {
    return cycles / (clock_mhz * 1000.0);
}

} // namespace codesign
