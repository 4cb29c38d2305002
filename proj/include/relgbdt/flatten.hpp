#pragma once

#include "relgbdt/dataset.hpp"
#include "relgbdt/schedule.hpp"
#include "relgbdt/schema.hpp"

namespace relgbdt {

struct FlatDataset {
  Schema schema;            // single table, no relations, root label retained
  DatasetInstance instance;
};

// Propositionalization along the schedule: walking nodes bottom-up, every
// numerical column of a child node (original or previously propagated) turns
// into a mean-aggregated parent column named `<rel>/.../<col>:mean`; every
// categorical column turns into one frequency column per vocabulary value
// (`<rel>/<col>:freq=<value>`). Empty relations give missing means and
// all-zero frequencies. Category vocabularies come from vocab_instance
// (default: the instance itself); unseen values contribute to no column.
FlatDataset flatten(const Schema& schema, const DatasetInstance& instance,
                    const Schedule& schedule, const DatasetInstance* vocab_instance = nullptr);

}  // namespace relgbdt
