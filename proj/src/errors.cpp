#include "mlirl/errors.hpp"

namespace mlirl {

void rethrow_with_context(const std::string& prefix) {
    try {
        throw;
    } catch (const ConvergenceError& e) {
        throw e.with_context(prefix);
    } catch (const NotFoundError& e) {
        throw NotFoundError(prefix + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(prefix + e.what());
    } catch (const InvariantError& e) {
        throw InvariantError(prefix + e.what());
    } catch (const SolverError& e) {
        throw SolverError(prefix + e.what());
    } catch (const IoError& e) {
        throw IoError(prefix + e.what());
    } catch (const Error& e) {
        throw Error(prefix + e.what());
    }
}

} // namespace mlirl
