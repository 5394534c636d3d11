// Parsing of protocol files (global types, processes, sessions) and of
// explicit multiparty LTSs in JSON.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synmpst/mlts.hpp"
#include "synmpst/syntax.hpp"

namespace synmpst {

struct Diagnostic
{
  SourceSpan span;
  std::string message;
};

std::string to_string(const Diagnostic & d);

struct GlobalDecl
{
  std::string name;
  GlobalType type;
  SourceSpan span;
};

struct ProcessDecl
{
  std::string name;
  Role role;
  Process process;
  SourceSpan span;
};

struct SessionDecl
{
  std::string name;
  std::string global;
  std::vector<std::pair<Role, std::string>> members;  // role : process name
  SourceSpan span;
};

struct ProtocolFile
{
  std::vector<GlobalDecl> globals;
  std::vector<ProcessDecl> processes;
  std::vector<SessionDecl> sessions;

  const GlobalDecl * find_global(std::string_view name) const;
  const ProcessDecl * find_process(std::string_view name) const;
  const SessionDecl * find_session(std::string_view name) const;
  /// The role-indexed session a declaration describes. Requires that every
  /// member names a declared process.
  Session build_session(const SessionDecl & decl) const;
};

/// Pretty-prints a file in the concrete syntax accepted by parse_file.
std::string to_string(const ProtocolFile & file);

struct ParseOptions
{
  /// Sessions must name a global declared in the same file. Turned off when
  /// the specification comes from an external MLTS instead.
  bool require_session_globals = true;
};

struct ParseResult
{
  std::optional<ProtocolFile> file;  // absent on syntax errors
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return file.has_value() && diagnostics.empty(); }
};

ParseResult parse_file(std::string_view text,
                       const std::string & path,
                       const ParseOptions & opts = {});

struct MltsParseResult
{
  std::optional<Mlts> mlts;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return mlts.has_value(); }
};

MltsParseResult parse_mlts(std::string_view text, const std::string & path = {});

}  // namespace synmpst
