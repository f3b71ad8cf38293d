/**
 * @file io.hpp
 * @brief Line-oriented plain-text instance formats (see docs/formats.md).
 *
 * Every domain has a parse/write pair and round-trips exactly. The generic
 * loader sniffs the leading keyword (cap / vrp / tap / nsp).
 */

#ifndef TEMPOFAIR_DOMAINS_IO_HPP
#define TEMPOFAIR_DOMAINS_IO_HPP

#include <iosfwd>
#include <memory>
#include <string>

#include "tempofair/domains/cap.hpp"
#include "tempofair/domains/nsp.hpp"
#include "tempofair/domains/tap.hpp"
#include "tempofair/domains/vrp.hpp"

namespace tempofair {

CapInstance parse_cap(std::istream& in);
void write_cap(const CapInstance& instance, std::ostream& out);

VrpInstance parse_vrp(std::istream& in, int n_vehicles_default = 4);
void write_vrp(const VrpInstance& instance, std::ostream& out);

TapInstance parse_tap(std::istream& in);
void write_tap(const TapInstance& instance, std::ostream& out);

NspInstance parse_nsp(std::istream& in);
void write_nsp(const NspInstance& instance, std::ostream& out);

/// Loads any instance file by its leading keyword.
std::unique_ptr<DomainInstance> load_instance(const std::string& path);

/// Formats a real exactly (shortest text that parses back to the same bits).
std::string format_real(double v);

} // namespace tempofair

#endif // TEMPOFAIR_DOMAINS_IO_HPP
