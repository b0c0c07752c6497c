#include "bmrisk/error.hpp"

#include <exception>

namespace bmrisk {

void rethrow_with_stage(const std::string& stage) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError("[" + stage + "] " + e.what());
  } catch (const DataError& e) {
    throw DataError("[" + stage + "] " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("[" + stage + "] " + e.what());
  } catch (const std::exception& e) {
    throw DataError("[" + stage + "] " + e.what());
  }
}

}  // namespace bmrisk
