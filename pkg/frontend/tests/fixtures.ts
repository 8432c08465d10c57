/**
 * Stub service fixtures for the scripted conversation tests.
 *
 * These payloads were captured verbatim from the real HTTP service
 * running over the bundled fixtures with the yelp.search 'location'
 * parameter made unbindable, so the stub answers byte-for-byte what
 * the live service would.
 */

import { SynthesizeResponse } from "../src/types.js";

export const EXPRESSION = "Is there any Chinese restaurant near Sydney Opera House";

export const NEEDS_INPUT: SynthesizeResponse = {
  "status": "needs_input",
  "reason": null,
  "api": {
    "api_id": "yelp",
    "score": 0.6105093525877066,
    "matched_evidence": [
      {
        "entity": "chinese_restaurant",
        "term": "pizza",
        "similarity": 0.9864415216590808
      },
      {
        "entity": "sydney_opera_house",
        "term": "restaurant",
        "similarity": 0.23457718351633225
      }
    ]
  },
  "declaration": {
    "declaration_id": "yelp.search",
    "best_sample_expression": "find me a good french restaurant in paris",
    "similarity": 0.9285716240012442
  },
  "matrix": [
    {
      "param": "term",
      "entity": "chinese_restaurant",
      "confidence": 0.9864415216590808
    }
  ],
  "coverage": {
    "declaration_id": "yelp.search",
    "required_total": 2,
    "required_bound": 1,
    "coverage": 0.5,
    "missing_required": [
      "location"
    ],
    "bound_optional": []
  },
  "call": null,
  "learned": [],
  "questions": [
    "What value should I use for 'location'?"
  ]
};

export const READY: SynthesizeResponse = {
  "status": "ready",
  "reason": null,
  "api": {
    "api_id": "yelp",
    "score": 0.6105093525877066,
    "matched_evidence": [
      {
        "entity": "chinese_restaurant",
        "term": "pizza",
        "similarity": 0.9864415216590808
      },
      {
        "entity": "sydney_opera_house",
        "term": "restaurant",
        "similarity": 0.23457718351633225
      }
    ]
  },
  "declaration": {
    "declaration_id": "yelp.search",
    "best_sample_expression": "find me a good french restaurant in paris",
    "similarity": 0.9285716240012442
  },
  "matrix": [
    {
      "param": "term",
      "entity": "chinese_restaurant",
      "confidence": 0.9864415216590808
    }
  ],
  "coverage": {
    "declaration_id": "yelp.search",
    "required_total": 2,
    "required_bound": 2,
    "coverage": 1.0,
    "missing_required": [],
    "bound_optional": []
  },
  "call": {
    "method": "GET",
    "url": "https://api.yelp.com/search?term=chinese%20restaurant&location=sydney%20opera%20house",
    "bindings": {
      "term": "chinese restaurant",
      "location": "sydney opera house"
    },
    "body": {}
  },
  "learned": [
    {
      "param": "term",
      "literal": "chinese restaurant",
      "confidence": 0.9864415216590808,
      "accepted": true
    }
  ],
  "questions": []
};

export const NO_MATCH: SynthesizeResponse = {
  "status": "no_match",
  "reason": "no_api_candidates",
  "api": null,
  "declaration": null,
  "matrix": [],
  "coverage": null,
  "call": null,
  "learned": [],
  "questions": []
};
