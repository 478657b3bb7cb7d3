"""Mocked cloud world and SDK stand-ins.

The mock SDK mirrors only the method names the fixture corpus uses; every
attempted call is appended to the call log with its verdict before any
state mutation, and denied calls (hooks raise before the mock runs) are
logged from the exception payload by the runner, so they mutate nothing.
"""

from __future__ import annotations

import copy
import time


class MockServiceWorld:
    """services: service -> resource -> state; plus an ordered call log."""

    def __init__(self, services=None):
        self.services = copy.deepcopy(services) if services else {}
        self.call_log = []

    def snapshot(self):
        return copy.deepcopy(self.services)

    def to_dict(self):
        return {"services": self.services, "call_log": self.call_log}

    @classmethod
    def from_dict(cls, doc):
        world = cls(doc.get("services", {}))
        world.call_log.extend(doc.get("call_log", []))
        return world

    def log(self, service, operation, resource, verdict, reason="Matched"):
        self.call_log.append({
            "service": service,
            "operation": operation,
            "resource": resource,
            "verdict": verdict,
            "reason": reason,
            "timestamp_ns": time.perf_counter_ns(),
        })

    # -- state helpers (log first, then mutate) ------------------------------

    def _bucketed(self, service):
        return self.services.setdefault(service, {})

    def put_object(self, service, bucket, key, body):
        self.log(service, "put", f"{bucket}/{key}", "allow")
        self._bucketed(service).setdefault(bucket, {})[key] = body

    def get_object(self, service, bucket, key):
        self.log(service, "get", f"{bucket}/{key}", "allow")
        store = self._bucketed(service).get(bucket, {})
        if key not in store:
            raise KeyError(f"{service}:{bucket}/{key} not found")
        return store[key]

    def delete_object(self, service, bucket, key):
        self.log(service, "delete", f"{bucket}/{key}", "allow")
        self._bucketed(service).get(bucket, {}).pop(key, None)

    def put_record(self, service, table, key, value):
        self.log(service, "put", f"{table}/{key}", "allow")
        self._bucketed(service).setdefault(table, {})[key] = value

    def get_record(self, service, table, key):
        self.log(service, "get", f"{table}/{key}", "allow")
        return self._bucketed(service).get(table, {}).get(key)

    def append_message(self, service, channel, message):
        self.log(service, "send", channel, "allow")
        store = self._bucketed(service)
        store.setdefault(channel, [])
        store[channel].append(message)

    def invoke_function(self, service, name, payload):
        self.log(service, "invoke", name, "allow")
        spec = self._bucketed(service).get(name)
        if spec is None:
            raise KeyError(f"no such function {name!r}")
        # a mock invocation applies the callee's side effect directly
        forwards = spec.get("forwards_to_table")
        if forwards and isinstance(payload, dict):
            self.put_record("database", forwards, payload.get("id", "?"),
                            payload.get("record", payload))
        return {"StatusCode": 200}


# ---------------------------------------------------------------------------
# Mock SDK modules (installed into sys.modules before the fixture imports)
# ---------------------------------------------------------------------------

class _Boto3Client:
    def __init__(self, world: MockServiceWorld, service: str):
        self._world = world
        self._service = service

    # generic object store (s3)
    def put_object(self, Bucket=None, Key=None, Body=None, **kw):
        if self._service == "database":
            self._world.put_record("database", kw.get("Table"), Key, Body)
            return {"ok": True}
        self._world.put_object(self._service, Bucket, Key, Body)
        return {"ETag": "mock"}

    def get_object(self, Bucket=None, Key=None, **kw):
        if self._service == "database":
            value = self._world.get_record("database", kw.get("Table"), Key)
            return {"Body": value}
        return {"Body": _Readable(self._world.get_object(self._service, Bucket, Key))}

    def delete_object(self, Bucket=None, Key=None, **kw):
        if self._service == "database":
            self._world.log("database", "delete", f"{kw.get('Table')}/{Key}", "allow")
            self._world.services.get("database", {}).get(kw.get("Table"), {}).pop(Key, None)
            return {}
        self._world.delete_object(self._service, Bucket, Key)
        return {}

    def list_objects_v2(self, Bucket=None, **kw):
        self._world.log(self._service, "list", Bucket or "*", "allow")
        contents = self._world.services.get(self._service, {}).get(Bucket, {})
        return {"Contents": [{"Key": k} for k in sorted(contents)]}

    def list_buckets(self, **kw):
        self._world.log(self._service, "list-buckets", "*", "allow")
        return {"Buckets": [{"Name": b} for b in sorted(self._world.services.get(self._service, {}))]}

    def invoke(self, FunctionName=None, Payload=None, **kw):
        import json as _json
        payload = Payload
        if isinstance(Payload, (str, bytes)):
            try:
                payload = _json.loads(Payload)
            except Exception:
                payload = {"raw": str(Payload)}
        return self._world.invoke_function("lambda", FunctionName, payload)

    def list_functions(self, **kw):
        self._world.log("lambda", "list", "*", "allow")
        return {"Functions": [{"FunctionName": n}
                              for n in sorted(self._world.services.get("lambda", {}))]}

    def publish(self, TopicArn=None, Message=None, **kw):
        self._world.append_message("sns", TopicArn, Message)
        return {"MessageId": "mock"}

    def send_message(self, QueueUrl=None, MessageBody=None, **kw):
        self._world.append_message("sqs", QueueUrl, MessageBody)
        return {"MessageId": "mock"}

    def receive_message(self, QueueUrl=None, **kw):
        self._world.log("sqs", "receive", QueueUrl, "allow")
        queued = self._world.services.get("sqs", {}).get(QueueUrl, [])
        return {"Messages": [{"Body": m} for m in queued[:1]]}

    def delete_message(self, QueueUrl=None, **kw):
        self._world.log("sqs", "delete", QueueUrl, "allow")
        return {}


class _Readable:
    def __init__(self, value):
        self._value = value

    def read(self):
        value = self._value
        if isinstance(value, str):
            return value.encode("utf-8")
        return value


class _DynamoTable:
    def __init__(self, world, name):
        self._world = world
        self._name = name

    def put_item(self, Item=None, **kw):
        self._world.put_record("dynamodb", self._name, (Item or {}).get("id", "?"), Item)
        return {}

    def get_item(self, Key=None, **kw):
        item = self._world.get_record("dynamodb", self._name, (Key or {}).get("id", "?"))
        return {"Item": item}

    def delete_item(self, Key=None, **kw):
        self._world.log("dynamodb", "delete", self._name, "allow")
        self._world.services.get("dynamodb", {}).get(self._name, {}).pop(
            (Key or {}).get("id", "?"), None)
        return {}

    def query(self, **kw):
        self._world.log("dynamodb", "query", self._name, "allow")
        return {"Items": list(self._world.services.get("dynamodb", {}).get(self._name, {}).values())}

    def update_item(self, Key=None, **kw):
        self._world.log("dynamodb", "update", self._name, "allow")
        return {}


class _DynamoResource:
    def __init__(self, world):
        self._world = world

    def Table(self, name):
        return _DynamoTable(self._world, name)


class MockBoto3:
    """Module-shaped stand-in for boto3."""

    __name__ = "boto3"

    def __init__(self, world: MockServiceWorld):
        self._world = world

    def client(self, service, **kw):
        return _Boto3Client(self._world, service)

    def resource(self, service, **kw):
        if service == "dynamodb":
            return _DynamoResource(self._world)
        return _Boto3Client(self._world, service)


class _GcsBlob:
    def __init__(self, world, bucket, name):
        self._world = world
        self._bucket = bucket
        self._name = name

    def upload_from_string(self, data, **kw):
        self._world.put_object("storage", self._bucket, self._name, data)

    upload_from_filename = upload_from_string

    def download_as_text(self, **kw):
        return self._world.get_object("storage", self._bucket, self._name)

    def download_as_bytes(self, **kw):
        value = self._world.get_object("storage", self._bucket, self._name)
        return value.encode("utf-8") if isinstance(value, str) else value

    def delete(self, **kw):
        self._world.delete_object("storage", self._bucket, self._name)


class _GcsBucket:
    def __init__(self, world, name):
        self._world = world
        self._name = name

    def blob(self, name):
        return _GcsBlob(self._world, self._name, name)


class MockGcsClientFactory:
    """Stand-in for google.cloud.storage (module with a Client class)."""

    __name__ = "google.cloud.storage"

    def __init__(self, world):
        self._world = world
        factory = self

        class Client:
            def __init__(self, *a, **kw):
                self._world = factory._world

            def bucket(self, name):
                return _GcsBucket(self._world, name)

            def list_blobs(self, bucket, **kw):
                self._world.log("storage", "list", bucket, "allow")
                return []

        self.Client = Client


def install_mock_sdk(world: MockServiceWorld):
    """Register mock SDK modules; call before importing the fixture."""
    import sys
    import types

    sys.modules["boto3"] = MockBoto3(world)

    google = types.ModuleType("google")
    google_cloud = types.ModuleType("google.cloud")
    storage = MockGcsClientFactory(world)
    google.cloud = google_cloud
    google_cloud.storage = storage
    sys.modules["google"] = google
    sys.modules["google.cloud"] = google_cloud
    sys.modules["google.cloud.storage"] = storage
