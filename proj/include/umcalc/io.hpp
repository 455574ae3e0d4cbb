#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "umcalc/dendrogram.hpp"
#include "umcalc/marked.hpp"
#include "umcalc/semigroup.hpp"

namespace umcalc {

/**
 * Document format. A tree is either
 *   {"mass": <number>, "mark": <optional string>}       an atom, or
 *   {"height": <number>, "children": [<trees>, ...]}    a merge node;
 * the null space is JSON null. Heights are quantized on input. A marked
 * document wraps a tree with its mark space:
 *   {"mark_space": {...}, "tree": <tree>}.
 */
Dendrogram dendrogram_from_json(const nlohmann::json& doc);
nlohmann::json dendrogram_to_json(const Dendrogram& d);

MarkSpace mark_space_from_json(const nlohmann::json& doc);
nlohmann::json mark_space_to_json(const MarkSpace& space);

MarkedDendrogram marked_from_json(const nlohmann::json& doc);
nlohmann::json marked_to_json(const MarkedDendrogram& d);

Dendrogram read_dendrogram_file(const std::string& path);
void write_dendrogram_file(const std::string& path, const Dendrogram& d);

/// Parses either a bare tree document or a marked wrapper into a tree
/// (marks kept); used by CLI commands that accept both.
Dendrogram read_any_tree_file(const std::string& path);

/**
 * Fragmentation path as CSV: columns h_low, h_high, count, mass_1, ... with
 * masses padded to the widest row; the last interval prints "inf". The null
 * space yields just the header.
 */
void emit_path_csv(const TopsPath& path, std::ostream& out);

}  // namespace umcalc
