#pragma once

#include <stdexcept>
#include <string>

namespace billiard {

enum class Errc {
    invalid_spec,
    non_convex,
    out_of_range,
    no_convergence,
    degenerate_chord,
    degenerate_segment,
    too_large,
    ordering_violated,
    infinite_delta,
    not_found,
    stale_certificate,
    parse_error,
    validation_error,
    overflow,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace billiard
