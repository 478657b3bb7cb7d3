"""Mock world bookkeeping."""

import pytest

from sandbox_harness.world import MockServiceWorld, MockBoto3


def test_log_precedes_mutation():
    world = MockServiceWorld({"s3": {"b": {}}})
    world.put_object("s3", "b", "k", "v")
    assert world.call_log[0]["verdict"] == "allow"
    assert world.services["s3"]["b"]["k"] == "v"


def test_get_missing_raises():
    world = MockServiceWorld({"s3": {"b": {}}})
    with pytest.raises(KeyError):
        world.get_object("s3", "b", "missing")


def test_boto3_client_shapes():
    world = MockServiceWorld({"s3": {"b": {}}, "sns": {}, "database": {"t": {}}})
    sdk = MockBoto3(world)
    s3 = sdk.client("s3")
    s3.put_object(Bucket="b", Key="k", Body="v")
    assert s3.get_object(Bucket="b", Key="k")["Body"].read() == b"v"
    sdk.client("sns").publish(TopicArn="t1", Message="m")
    assert world.services["sns"]["t1"] == ["m"]
    db = sdk.client("database")
    db.put_object(Table="t", Key="id1", Body="row")
    assert db.get_object(Table="t", Key="id1")["Body"] == "row"


def test_lambda_invoke_applies_callee_effect():
    world = MockServiceWorld({
        "lambda": {"function-b": {"forwards_to_table": "db-b"}},
        "database": {"db-b": {}},
    })
    sdk = MockBoto3(world)
    sdk.client("lambda").invoke(FunctionName="function-b",
                                Payload='{"id": "1", "record": "data"}')
    assert world.services["database"]["db-b"] == {"1": "data"}


def test_dynamo_table_binder():
    world = MockServiceWorld({"dynamodb": {"users": {}}})
    table = MockBoto3(world).resource("dynamodb").Table("users")
    table.put_item(Item={"id": "7", "name": "x"})
    assert table.get_item(Key={"id": "7"})["Item"] == {"id": "7", "name": "x"}
