import boto3

s3 = boto3.client("s3")


def handler(event, context):
    if event.get("archive"):
        s3.put_object(Bucket="cold-archive", Key="snapshot.bin", Body=event["blob"])
    else:
        s3.put_object(Bucket="hot-store", Key="snapshot.bin", Body=event["blob"])
    return {"ok": True}
