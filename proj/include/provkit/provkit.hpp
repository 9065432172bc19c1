#pragma once

// Umbrella header: the whole provenance toolkit.
//
//   value / schema      typed scalars and relation schemas
//   provenance_id       tuple ids with optional versions ("r2@t1")
//   polynomial          provenance polynomials and witness bases
//   database            versioned storage with point-in-time snapshots
//   csv                 CSV ingestion
//   algebra / parser    relational algebra and the query dialect
//   evaluate            annotated evaluation (how/why/where/what)
//   why_not             explanations for missing rows
//   prov_graph          workflow graph (agents, activities, entities)
//   id_database         tuple-to-file bridge between the two worlds
//   questions           the eight provenance questions at three scopes
//   project             on-disk project layout and locking
//   sha256              content fingerprints for registered files

#include "provkit/algebra.hpp"
#include "provkit/csv.hpp"
#include "provkit/database.hpp"
#include "provkit/errors.hpp"
#include "provkit/evaluate.hpp"
#include "provkit/id_database.hpp"
#include "provkit/parser.hpp"
#include "provkit/polynomial.hpp"
#include "provkit/project.hpp"
#include "provkit/prov_graph.hpp"
#include "provkit/provenance_id.hpp"
#include "provkit/questions.hpp"
#include "provkit/schema.hpp"
#include "provkit/sha256.hpp"
#include "provkit/value.hpp"
#include "provkit/why_not.hpp"
