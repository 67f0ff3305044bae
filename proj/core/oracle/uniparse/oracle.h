// Copyright 2026 The Uniparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNIPARSE_ORACLE_H_
#define UNIPARSE_ORACLE_H_

// Slow, index-free reference implementations. Every function here scans the
// whole triple list or materializes full cross products; they exist to check
// the fast paths and to count the exhaustive search space.

#include <set>
#include <string>
#include <vector>

#include "uniparse/datamodel.h"
#include "uniparse/enumerator.h"
#include "uniparse/sexpr.h"
#include "uniparse/sql.h"

namespace uniparse::oracle {

// Every (JOIN r e) / (JOIN (R r) e) anchored on a linked entity and, when
// depth is 2, every one-hop extension of those. Deduplicated, in first-found
// order.
std::vector<SExpr> EnumerateLogicalFormsKb(const std::vector<std::string>& linked,
                                           const KnowledgeBase& kb, int depth = 2,
                                           const TraversalOptions& options = {});

// Second hops that some two-hop path starting with one of the given first
// hops ends in.
std::set<SecondHop> ReachableSecondHops(const std::vector<FirstHop>& first_hops,
                                        const KnowledgeBase& kb,
                                        const TraversalOptions& options = {});

// SELECT [agg](t.c) FROM t [WHERE cond] for every column and every supplied
// condition on the same table.
std::vector<SqlQuery> EnumerateLogicalFormsDb(const Database& db,
                                              const std::vector<TbClVl>& conditions);

KbAnswer BruteExecuteSExpr(const SExpr& expr, const KnowledgeBase& kb);

ResultTable BruteExecuteSql(const SqlQuery& query, const Database& db);

}  // namespace uniparse::oracle

#endif  // UNIPARSE_ORACLE_H_
