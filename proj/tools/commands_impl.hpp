#pragma once

#include <ostream>

#include "quasiode/error.hpp"

namespace quasiode::cli {

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const AssertionError& e) {
        err << "internal error: " << e.what() << '\n';
        return kMismatch;
    } catch (const Error& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    }
}

}  // namespace quasiode::cli
