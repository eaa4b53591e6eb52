#pragma once

#include "phdae/model.hpp"
#include "phdae/transform.hpp"

#include <filesystem>
#include <iosfwd>

namespace phdae {

/// Plain-text matrix file.
///
///     # comment
///     dims n ell m
///     E
///     2 0 0 0 0
///     ...
///     c
///     0
///
/// The header declares the dimensions. Each block starts with its name alone on a line
/// followed by rows*cols whitespace-separated decimal entries in row-major order; line
/// breaks inside a block are free. Blocks E J R B P S N Z w Q v c are recognised and any
/// block left out is zero. Errors are reported as ParseError with line and block.
LtiModel read_lti(std::istream& in);
LtiModel read_lti_file(const std::filesystem::path& path);

/// Writes every block with 17 significant digits; read_lti(write_lti(x)) == x.
void write_lti(std::ostream& out, const LtiModel& lti);

/// Interconnection relation file: header `dims k m` and blocks M_ic, N_ic (k x m each).
InterconnectionSpec read_interconnection(std::istream& in);
InterconnectionSpec read_interconnection_file(const std::filesystem::path& path);

}  // namespace phdae
