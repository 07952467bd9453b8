#pragma once

// Catch2 matcher asserting a LabError carries a specific code.

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "ledgerlab/errors.hpp"

class ErrorCodeMatcher : public Catch::Matchers::MatcherBase<ledgerlab::LabError> {
public:
    explicit ErrorCodeMatcher(ledgerlab::ErrorCode expected) : expected_(expected) {}

    bool match(const ledgerlab::LabError& err) const override { return err.code() == expected_; }

    std::string describe() const override {
        return std::string("has error code ") + ledgerlab::error_code_name(expected_);
    }

private:
    ledgerlab::ErrorCode expected_;
};

inline ErrorCodeMatcher ErrorCodeIs(ledgerlab::ErrorCode expected) {
    return ErrorCodeMatcher(expected);
}
