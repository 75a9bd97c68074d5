// Prints the header and mean power of an FWV1 waveform dump.

#include "cofdm/config.hpp"
#include "cofdm/waveform.hpp"

#include <iostream>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: wvinfo <file.fwv>\n";
    return 2;
  }
  try {
    const cofdm::DualPolWaveform w = cofdm::read_fwv(argv[1]);
    std::cout << "samples:          " << w.size() << "\n";
    std::cout << "sample_rate_hz:   " << cofdm::format_double(w.sample_rate_hz) << "\n";
    std::cout << "center_offset_hz: " << cofdm::format_double(w.center_offset_hz) << "\n";
    std::cout << "power_dbm:        " << cofdm::format_double(cofdm::power_dbm(w)) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
