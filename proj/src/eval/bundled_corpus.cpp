// Copyright 2026 The QMS Authors.
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

#include "qms/eval/bundled_corpus.hpp"

namespace qms::eval {

std::string_view bundled_corpus() {
  static constexpr std::string_view kCorpus = R"(the user creates a new process instance
the system can execute the instance and stop it afterward
the user starts the process and the system records the start event
the clerk receives the order and checks the order for completeness
the manager approves the order and the clerk sends the invoice
the customer submits a request and the agent reviews the request
the agent forwards the request to the manager for approval
the system validates the input and stores the record in the database
the operator starts the machine and monitors the production line
the machine produces the part and the inspector checks the part
the inspector rejects the part when the quality check fails
the user uploads the document and the system extracts the text
the system returns the list of actor and activity pairs
extract the actor and activity pairs from the text
return only the list of json documents in the following format
the actor is the user and the activity is create a new process instance
the actor is the system and the activity is execute the instance
the actor is the system and the activity is stop the instance
the analyst defines the process model and the engineer deploys the model
the engineer configures the server and the system executes the workflow
the user cancels the instance and the system stops the workflow
the system sends a notification to the user after the instance stops
the supplier delivers the goods and the warehouse worker stores the goods
the warehouse worker picks the items and packs the shipment
the courier collects the shipment and delivers it to the customer
the customer confirms the delivery and pays the invoice
the accountant books the payment and closes the case
the user logs in and the system displays the dashboard
the user selects a model and the system runs the evaluation
the system computes the metrics and the user reviews the results
the reviewer documents the risks and the manager signs the report
the nurse registers the patient and the doctor examines the patient
the doctor orders a test and the laboratory analyses the sample
the laboratory reports the result and the doctor informs the patient
the teacher creates an exam and the students submit their answers
the teacher grades the answers and publishes the results
the developer writes the code and the reviewer approves the change
the pipeline builds the code and the system deploys the release
the administrator creates a new account for the user
the user resets the password and the system sends a confirmation
the planner schedules the task and the worker completes the task
the worker reports the progress and the planner updates the plan
the system monitors the process and raises an alert on failure
the operator acknowledges the alert and restarts the process
the auditor checks the records and writes the audit report
the user exports the report and the system generates a document
the clerk archives the document after the case is closed
the process ends when the system stops the instance
)";
  return kCorpus;
}

std::string_view demo_prompt() {
  static constexpr std::string_view kPrompt =
      "Extract the Actor and Activity pairs from the text. Return only the list of JSON documents "
      "in the following format: [{'actor': 'example_actor_1', 'activity': 'example_activity_1'}, "
      "{'actor': 'example_actor_2', 'activity': 'example_activity_2'}, ...] without any further "
      "explanation: The user creates a new process instance, then the system can execute the "
      "instance and stop it afterward.";
  return kPrompt;
}

std::string_view demo_expected_output() {
  static constexpr std::string_view kExpected =
      "[{'actor': 'user', 'activity': 'creates a new process instance'}, "
      "{'actor': 'system', 'activity': 'execute the instance'}, "
      "{'actor': 'system', 'activity': 'stop the instance'}]";
  return kExpected;
}

}  // namespace qms::eval
