/*
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef UFS_ERROR_HPP_INCLUDE
#define UFS_ERROR_HPP_INCLUDE

#include <stdexcept>
#include <string>

namespace ufs
{
    enum class ErrorKind
    {
        ordering,
        parse,
        parameter,
        config,
        not_ready,
        range,
        stale_data,
        divergence,
        actuation,
        hardware_reject,
        counter_reset,
        source,
    };

    const char *to_string(ErrorKind kind);

    /// Base exception for the library; every thrown error carries a kind so
    /// callers (notably the CLI exit-code mapping) can branch without RTTI.
    class Error : public std::runtime_error
    {
        public:
            Error(ErrorKind kind, const std::string &what)
                : std::runtime_error(what)
                , m_kind(kind)
            {

            }

            ErrorKind kind(void) const noexcept
            {
                return m_kind;
            }

        private:
            ErrorKind m_kind;
    };

    /// Parse failure with the 1-based line number of the offending row.
    class ParseError : public Error
    {
        public:
            ParseError(std::size_t line, const std::string &detail, const std::string &source = "")
                : Error(ErrorKind::parse,
                        (source.empty() ? "line " : source + ":") + std::to_string(line) + ": " + detail)
                , m_line(line)
                , m_detail(detail)
            {

            }

            std::size_t line(void) const noexcept
            {
                return m_line;
            }

            const std::string &detail(void) const noexcept
            {
                return m_detail;
            }

        private:
            std::size_t m_line;
            std::string m_detail;
    };
}

#endif
