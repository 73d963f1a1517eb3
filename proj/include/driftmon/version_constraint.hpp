#pragma once

#include <optional>
#include <string>
#include <vector>

namespace driftmon {

// Semver-ish comparison: dot-separated numeric parts, missing parts read as 0,
// a -prerelease suffix sorts below the plain release.
int compare_versions(const std::string& a, const std::string& b);

struct ConstraintClause {
    std::string op;  // ==, !=, >=, <=, >, <, ~=, ^, ~
    std::string version;
};

struct ConstraintExpr {
    std::string name;
    std::vector<ConstraintClause> clauses;  // conjunction
};

// Parse "name==1.2.3", "name>=1.2,<2", "name@^1.2.3", "name@~1.2.3".
// Returns nullopt when the text is not name + constraint.
std::optional<ConstraintExpr> parse_constraint(const std::string& text);

// Version against one clause / a whole conjunction.
bool clause_satisfied(const std::string& version, const ConstraintClause& clause);
bool satisfies(const std::string& version, const ConstraintExpr& expr);

}  // namespace driftmon
